#!/usr/bin/env python3
"""Regenerates fixture_vectors.txt: a small clustered word-vector table.

Words in the same cluster share a base direction (cosine around 0.8);
words in different clusters are close to orthogonal. Optional parent
clusters pull related groups (e.g. hand tools) moderately together.
"""
import numpy as np

DIM = 24
SEED = 7

# cluster name -> (parent or None, words)
CLUSTERS = {
    "tool": (None, []),
    "hammer": ("tool", ["hammer", "mallet", "claw"]),
    "screwdriver": ("tool", ["screwdriver", "wrench", "pliers", "spanner"]),
    "drinkware": (None, ["mug", "cup", "teacup", "tumbler"]),
    "tape": (None, ["tape", "duct", "roll", "adhesive"]),
    "computer": (None, ["laptop", "computer", "notebook"]),
    "peripheral": ("computer", ["keyboard", "mouse", "webcam"]),
    "gamepad": (None, ["gamepad", "controller", "joystick", "game"]),
    "bottle": (None, ["bottle", "flask", "thermos"]),
    "book": (None, ["book", "novel", "paperback"]),
    "writing": (None, ["pen", "marker", "pencil", "highlighter"]),
    "scissors": (None, ["scissors", "shears"]),
    "dish": (None, ["bowl", "dish", "plate", "saucer"]),
    "phone": (None, ["phone", "smartphone", "cellphone"]),
    "remote": (None, ["remote", "clicker"]),
    "box": (None, ["box", "carton", "container", "crate"]),
    "can": (None, ["can", "tin", "soda"]),
    "fruit": (None, ["apple", "banana", "orange", "fruit"]),
    "lamp": (None, ["lamp", "light", "lantern"]),
    "eyewear": (None, ["glasses", "sunglasses", "spectacles"]),
    "wallet": (None, ["wallet", "purse"]),
    "sponge": (None, ["sponge", "scrubber"]),
    "towel": (None, ["towel", "napkin", "rag"]),
    "clock": (None, ["clock", "timer", "alarm"]),
    "vase": (None, ["vase", "pot", "planter"]),
    "candle": (None, ["candle", "wax"]),
    "plant": (None, ["plant", "succulent", "cactus"]),
    "headphones": (None, ["headphones", "headset", "earbuds"]),
    "toy": (None, ["toy", "figurine", "doll"]),
    "furniture": (None, ["table", "desk", "shelf", "counter"]),
    "room": (None, ["kitchen", "office", "room", "lab"]),
    "coffee": (None, ["coffee", "tea", "espresso"]),
    "water": (None, ["water", "drink"]),
    "wood": (None, ["wood", "wooden", "timber", "oak", "bamboo"]),
    "metal": (None, ["metal", "metallic", "steel", "aluminum", "aluminium", "iron",
                     "stainless", "brushed", "chrome"]),
    "plastic": (None, ["plastic", "polymer", "acrylic", "abs"]),
    "ceramic": (None, ["ceramic", "porcelain", "clay", "stoneware", "glazed"]),
    "glass": (None, ["glass", "crystal", "tempered"]),
    "paper": (None, ["paper", "cardboard", "card"]),
    "fabric": (None, ["fabric", "cloth", "cotton", "textile", "woven"]),
    "rubber": (None, ["rubber", "silicone", "foam"]),
    "leather": (None, ["leather", "suede"]),
}


def main():
    rng = np.random.default_rng(SEED)
    bases = {}

    def unit(v):
        return v / np.linalg.norm(v)

    for name, (parent, _) in CLUSTERS.items():
        own = unit(rng.standard_normal(DIM))
        if parent is not None:
            own = unit(0.55 * bases[parent] + 0.85 * own)
        bases[name] = own

    rows = []
    for name, (_, words) in CLUSTERS.items():
        for w in words:
            v = unit(0.9 * bases[name] + 0.45 * unit(rng.standard_normal(DIM)))
            rows.append((w, v))

    with open("fixture_vectors.txt", "w") as f:
        f.write(f"{len(rows)} {DIM}\n")
        for w, v in rows:
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


if __name__ == "__main__":
    main()
