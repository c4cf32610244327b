#!/usr/bin/env python3
"""Regenerates the three bundled replay scenarios.

Each scenario is scripted as a small world simulation: objects sit on
tables, the script moves or removes them and points the camera at a table.
Detections are every present object whose centroid the camera sees, so the
ground truth and the detections can never disagree about visibility.
Some detections carry a mask+depth pair ray-cast from the object's box
instead of a ready bbox.

Usage: python3 generate_scenarios.py   (writes level*.json next to itself)
"""
import json
import os
import re

import numpy as np

W, H = 64, 48
FX = FY = 50.0
CX, CY = 32.0, 24.0
NEAR, FAR = 0.3, 4.0
TABLE_TOP = 0.75
CAMERA_HEIGHT = 1.2
# Camera looking along world +y: x right, y down (world -z), z forward.
LOOK_FORWARD = [1, 0, 0, 0, 0, 1, 0, -1, 0]
TABLE_X = {"A": 0.0, "B": 3.0, "C": 6.0}

INTRINSICS = {"fx": FX, "fy": FY, "cx": CX, "cy": CY, "width": W, "height": H}


def r6(x):
    return round(float(x), 6)


def box_json(lo, hi):
    return {"min": [r6(v) for v in lo], "max": [r6(v) for v in hi]}


def camera_point(view, p):
    t = np.array([TABLE_X[view], 0.0, CAMERA_HEIGHT])
    r = np.array(LOOK_FORWARD, dtype=float).reshape(3, 3)
    return r.T @ (np.asarray(p) - t)


def in_view(view, center):
    x, y, z = camera_point(view, center)
    return NEAR <= z <= FAR and abs(x / z) <= W / 2 / FX and abs(y / z) <= H / 2 / FY


def render_mask_depth(view, lo, hi):
    """Ray-casts the box; depth is the camera z of the first hit."""
    t = np.array([TABLE_X[view], 0.0, CAMERA_HEIGHT])
    r = np.array(LOOK_FORWARD, dtype=float).reshape(3, 3)
    lo, hi = np.asarray(lo), np.asarray(hi)
    mask, depth = [], []
    for v in range(H):
        for u in range(W):
            d = r @ np.array([(u - CX) / FX, (v - CY) / FY, 1.0])
            with np.errstate(divide="ignore"):
                inv = 1.0 / d
            t0, t1 = (lo - t) * inv, (hi - t) * inv
            enter = np.max(np.minimum(t0, t1))
            leave = np.min(np.maximum(t0, t1))
            if leave >= max(enter, 0.0) and enter > 0.0:
                mask.append(1)
                depth.append(round(float(enter), 4))
            else:
                mask.append(0)
                depth.append(0)
    return mask, depth


def fit_description(text, n=100):
    """Pads text with filler words to exactly n bytes."""
    fillers = ["kept", "near", "the", "back", "edge", "of", "its", "shelf", "today", "in",
               "a", "tidy", "spot", "by", "staff", "and", "often", "used", "at", "noon"]
    rem = n - len(text)
    if rem == 0:
        return text
    # reach[k]: filler index sequence whose " w" lengths sum to k
    reach = {0: []}
    for k in range(1, rem + 1):
        for i, w in enumerate(fillers):
            step = len(w) + 1
            prev = k - step
            if prev in reach and (k not in reach or len(reach[prev]) + 1 < len(reach[k])):
                if i not in reach[prev]:
                    reach[k] = reach[prev] + [i]
    if rem not in reach:
        raise ValueError(f"cannot pad {text!r} to {n}")
    out = text + "".join(" " + fillers[i] for i in sorted(reach[rem]))
    assert len(out) == n, (out, len(out))
    return out


class Script:
    def __init__(self, name):
        self.name = name
        self.objects = {}  # key -> {"attrs", "lo", "hi"}
        self.frames = []
        self.events = []

    # world edits ---------------------------------------------------------
    def place(self, key, attrs, x, y, size):
        sx, sy, sz = size
        self.objects[key] = {
            "attrs": attrs,
            "size": size,
            "lo": [x - sx / 2, y - sy / 2, TABLE_TOP],
            "hi": [x + sx / 2, y + sy / 2, TABLE_TOP + sz],
        }

    def move(self, key, x, y, deadline_frame):
        """Moves key; scored after deadline_frame (the frame that re-observes it)."""
        o = self.objects[key]
        self.place(key, o["attrs"], x, y, o["size"])
        self.events.append({"kind": "moved", "object_key": key, "frame": len(self.frames),
                            "deadline": deadline_frame,
                            "expected_bbox": box_json(self.objects[key]["lo"],
                                                      self.objects[key]["hi"])})

    def remove(self, key, deadline_frame):
        o = self.objects.pop(key)
        self.events.append({"kind": "removed", "object_key": key, "frame": len(self.frames),
                            "deadline": deadline_frame,
                            "expected_bbox": box_json(o["lo"], o["hi"])})

    def exists(self, key):
        o = self.objects[key]
        self.events.append({"kind": "exists", "object_key": key, "frame": len(self.frames) - 1,
                            "expected_bbox": box_json(o["lo"], o["hi"]),
                            "attributes": dict(o["attrs"])})

    # observations --------------------------------------------------------
    def frame(self, view, exploration, order=None, noise=None, masks=()):
        noise = noise or {}
        keys = [k for k, o in self.objects.items()
                if in_view(view, [(a + b) / 2 for a, b in zip(o["lo"], o["hi"])])]
        if order is not None:
            keys = [k for k in order if k in keys] + [k for k in keys if k not in order]
        detections = []
        for k in keys:
            o = self.objects[k]
            det = dict(o["attrs"])
            det.update(noise.get(k, {}))
            if k in masks:
                mask, depth = render_mask_depth(view, o["lo"], o["hi"])
                assert sum(mask) >= 3, f"{k} too small for a mask in view {view}"
                det["mask"] = {"width": W, "height": H, "data": mask}
                det["depth"] = {"width": W, "height": H, "data": depth}
            else:
                det["bbox3d"] = box_json(o["lo"], o["hi"])
            detections.append(det)
        self.frames.append({
            "exploration": exploration,
            "pose": {"rotation": LOOK_FORWARD,
                     "translation": [TABLE_X[view], 0.0, CAMERA_HEIGHT]},
            "intrinsics": INTRINSICS,
            "detections": detections,
        })
        return len(self.frames) - 1

    @property
    def next_frame(self):
        return len(self.frames)

    def document(self):
        tables = [{"label": "table", "color": "white", "material": "wood",
                   "description": f"work table {name}",
                   "bbox": box_json([x - 0.9, 1.5, 0.0], [x + 0.9, 2.5, TABLE_TOP])}
                  for name, x in TABLE_X.items()]
        return {
            "name": self.name,
            "rooms": [{"label": "lab", "polygon": [[-2, -1], [8, -1], [8, 4], [-2, 4]]}],
            "supports": tables,
            "frames": self.frames,
            "ground_truth": self.events,
        }


def attrs(label, color, material, description):
    return {"label": label, "color": color, "material": material, "description": description}


# ------------------------------------------------------------------ level 1

def level1():
    s = Script("level1_easy")
    s.place("hammer", attrs("hammer", "red", "steel", "red claw hammer with a steel head"),
            -0.4, 2.0, (0.30, 0.10, 0.06))
    s.place("mug", attrs("mug", "blue", "ceramic", "blue ceramic coffee mug with a handle"),
            0.0, 2.0, (0.12, 0.12, 0.12))
    s.place("tape", attrs("tape", "silver", "plastic", "roll of silver duct tape"),
            0.4, 2.0, (0.14, 0.14, 0.08))

    s.frame("A", True, masks=("hammer", "mug", "tape"))
    for k in ("hammer", "mug", "tape"):
        s.exists(k)
    s.frame("A", False)
    # Each object in turn is carried to table B, seen there, then its old spot is revisited.
    for k, (x, y) in (("hammer", (2.6, 2.0)), ("mug", (3.0, 2.0)), ("tape", (3.4, 2.0))):
        s.move(k, x, y, s.next_frame)
        s.frame("B", False, masks=(k,))
        s.frame("A", False)
    deadline = s.next_frame
    for k in ("hammer", "mug", "tape"):
        s.remove(k, deadline)
    s.frame("B", False)
    return s


# ------------------------------------------------------------------ level 2

def level2():
    s = Script("level2_medium")
    items = [
        # key, label, color, material, description stem, table, x, y, size
        ("mug_a", "ceramic coffee mug", "dark olive green", "glazed stoneware",
         "olive green stoneware coffee mug with a wide handle and a chipped rim on one side", "A", -0.6, 1.8),
        ("mug_b", "ceramic coffee mug", "deep midnight navy", "glazed stoneware",
         "navy blue stoneware coffee mug with a thin handle and a white speckled glaze", "A", -0.3, 1.8),
        ("hammer", "claw hammer tool", "bright crimson red", "brushed steel metal",
         "crimson handled claw hammer with a brushed steel head resting flat on the table", "A", 0.0, 1.8),
        ("tape", "roll of duct tape", "metallic silver gray", "adhesive plastic tape",
         "half used roll of silver duct tape lying on its side next to the edge", "A", 0.3, 1.8),
        ("laptop", "laptop computer", "space gray black", "aluminum alloy shell",
         "closed gray laptop computer with a black keyboard and a sticker on the lid", "A", 0.6, 1.8),
        ("pen", "ballpoint pen set", "black and silver", "plastic and steel",
         "three black ballpoint pens with silver clips held together with a rubber band", "A", -0.45, 2.25),
        ("scissors", "office scissors pair", "orange and black", "stainless steel blade",
         "pair of office scissors with orange plastic grips and long stainless blades", "A", 0.45, 2.25),
        ("bottle_a", "stainless water bottle", "forest green dark", "stainless steel metal",
         "dark green insulated water bottle with a screw cap and a carry loop on top", "B", 2.4, 1.8),
        ("bottle_b", "stainless water bottle", "pure white matte", "stainless steel metal",
         "matte white insulated water bottle with a bamboo lid and a narrow spout", "B", 2.7, 1.8),
        ("gamepad", "wireless game controller", "jet black glossy", "abs plastic shell",
         "glossy black wireless game controller with two analog sticks and a charging cable", "B", 3.0, 1.8),
        ("book", "paperback novel book", "faded yellow cream", "printed paper pages",
         "worn paperback novel with a yellow cover, folded corners and a bookmark inside", "B", 3.3, 1.8),
        ("phone", "smartphone cellphone", "rose gold and pink", "tempered glass screen",
         "pink smartphone lying face up with a cracked tempered glass screen protector", "B", 3.6, 1.8),
        ("bowl", "ceramic cereal bowl", "pale sky light blue", "glazed porcelain clay",
         "light blue porcelain cereal bowl with a thin white rim and a spoon inside it", "B", 2.55, 2.25),
        ("clock", "small alarm clock", "bright yellow round", "plastic and glass",
         "round yellow alarm clock with two bells on top and a glowing analog dial", "B", 3.45, 2.25),
        ("lamp", "desk reading lamp", "matte charcoal black", "painted steel metal",
         "black adjustable desk lamp with a hinged arm and a round weighted base", "C", 5.4, 1.8),
        ("plant", "potted succulent plant", "leafy green brown", "terracotta clay pot",
         "small succulent plant in a brown terracotta pot with gravel on the soil", "C", 5.7, 1.8),
        ("box", "cardboard storage box", "kraft paper brown", "recycled cardboard",
         "brown cardboard storage box with a folded lid and a handwritten label", "C", 6.0, 1.8),
        ("wallet", "leather bifold wallet", "dark chocolate brown", "genuine leather hide",
         "dark brown leather bifold wallet with visible stitching along each edge", "C", 6.3, 1.8),
        ("headphones", "over ear headphones", "silver and black", "plastic and foam pads",
         "silver over ear headphones with black foam cushions and a coiled cable", "C", 6.6, 1.8),
        ("candle", "scented wax candle", "lavender purple soft", "paraffin wax glass jar",
         "purple scented wax candle in a glass jar with a burnt black wick", "C", 5.55, 2.25),
        ("vase", "glass flower vase", "clear crystal white", "tempered crystal glass",
         "tall clear glass flower vase holding three dried flowers and some water", "C", 6.45, 2.25),
    ]
    size = (0.14, 0.14, 0.14)
    for key, label, color, material, stem, table, x, y in items:
        for field in (label, color, material):
            assert len(field) >= 15, field
        s.place(key, attrs(label, color, material, fit_description(stem)), x, y, size)

    on = {t: [k for k, *_rest in items if _rest[4] == t] for t in TABLE_X}
    for t in ("A", "B", "C"):
        s.frame(t, True)
        for k in on[t]:
            s.exists(k)
    for t in ("A", "B", "C"):
        s.frame(t, False)

    # Within-table moves observed directly: the stale copy is pruned in the same frame.
    s.move("hammer", 0.0, 2.35, s.next_frame)
    s.move("mug_a", -0.75, 2.35, s.next_frame)
    s.move("bowl", 3.15, 2.35, s.next_frame + 1)
    s.move("bottle_b", 2.85, 2.35, s.next_frame + 1)
    s.frame("A", False)
    s.frame("B", False)

    # Off-screen swaps: each old spot is seen empty before the new one comes into view.
    s.move("mug_b", 5.85, 2.3, s.next_frame + 2)   # A -> C
    s.move("phone", -0.15, 2.3, s.next_frame)      # B -> A
    s.frame("A", False)
    s.frame("B", False)
    s.frame("C", False)

    s.move("wallet", 2.85, 2.3, s.next_frame + 1)  # C -> B
    s.frame("C", False)
    s.frame("B", False)

    # Three off-screen removals, noticed when their tables come back into view.
    removal_frame = s.next_frame
    s.remove("tape", removal_frame + 1)
    s.remove("bottle_a", removal_frame + 2)
    s.remove("vase", removal_frame)
    s.frame("C", False)
    s.frame("A", False)
    s.frame("B", False)

    s.move("gamepad", 6.15, 2.3, s.next_frame + 1)  # B -> C
    s.frame("B", False)
    s.frame("C", False)
    return s


# ------------------------------------------------------------------ level 3

def level3():
    s = Script("level3_hard")
    mug = (0.10, 0.10, 0.11)
    bottle = (0.08, 0.08, 0.24)
    s.place("blue_mug", attrs("mug", "blue", "ceramic", "blue ceramic mug with a white handle"),
            0.15, 2.0, mug)
    s.place("red_mug", attrs("mug", "red", "ceramic", "red porcelain mug, chipped rim"),
            -0.15, 2.0, mug)
    s.place("hammer", attrs("hammer", "brown", "wood", "hammer with a wooden handle"),
            -0.55, 1.8, (0.30, 0.10, 0.05))
    s.place("tape", attrs("tape", "silver", "plastic", "roll of duct tape"),
            0.55, 2.2, (0.12, 0.12, 0.06))
    s.place("green_bottle", attrs("bottle", "green", "glass", "green glass bottle of sparkling water"),
            2.85, 2.0, bottle)
    s.place("white_bottle", attrs("bottle", "white", "plastic", "white plastic bottle with a pump"),
            3.15, 2.0, bottle)
    s.place("screwdriver", attrs("screwdriver", "yellow", "metal", "yellow handled screwdriver"),
            2.5, 1.8, (0.22, 0.04, 0.04))
    s.place("laptop", attrs("laptop", "silver", "aluminum", "open silver laptop showing a terminal"),
            6.0, 2.0, (0.34, 0.24, 0.02))
    s.place("gamepad", attrs("gamepad", "black", "plastic", "black wireless game controller"),
            6.5, 1.8, (0.16, 0.10, 0.05))

    s.frame("A", True, order=("blue_mug", "red_mug"), masks=("laptop",))
    for k in ("blue_mug", "red_mug", "hammer", "tape"):
        s.exists(k)
    s.frame("B", True)
    for k in ("green_bottle", "white_bottle", "screwdriver"):
        s.exists(k)
    s.frame("C", True, masks=("laptop",))
    for k in ("laptop", "gamepad"):
        s.exists(k)
    s.frame("A", False, noise={"red_mug": {"description": "red porcelain mug"}})

    # 1: red mug carried to table B, leaving its look-alike behind.
    s.move("red_mug", 3.5, 2.25, s.next_frame)
    s.frame("B", False, noise={"red_mug": {"description": "red mug with a chipped rim"}})
    s.frame("A", False)
    # 2: hammer slides across table A.
    s.move("hammer", 0.5, 1.75, s.next_frame)
    s.frame("A", False, noise={"hammer": {"color": "saddle brown"}})
    # 3: laptop taken from C to A while the camera looks at B.
    s.move("laptop", -0.5, 2.2, s.next_frame + 2)
    s.frame("B", False)
    s.frame("C", False)
    s.frame("A", False, noise={"laptop": {"label": "notebook computer"}})
    # 4: green bottle leaves the white one on B and is next seen on C.
    s.move("green_bottle", 5.7, 2.1, s.next_frame)
    s.frame("C", False)
    s.frame("B", False)
    # 5: tape to B.
    s.move("tape", 2.6, 2.25, s.next_frame)
    s.frame("B", False, noise={"tape": {"label": "duct tape"}})
    s.frame("A", False)
    # 6: red mug returns to A, next to the blue one again.
    s.move("red_mug", -0.15, 2.0, s.next_frame + 1)
    s.frame("B", False)
    s.frame("A", False, noise={"red_mug": {"color": "crimson"}})
    # 7: screwdriver moves along table B.
    s.move("screwdriver", 3.4, 1.75, s.next_frame)
    s.frame("B", False)
    # 8 and 9: gamepad C -> B, white bottle B -> A.
    s.move("gamepad", 2.9, 2.35, s.next_frame + 1)
    s.move("white_bottle", 0.3, 1.8, s.next_frame)
    s.frame("A", False)
    s.frame("B", False, noise={"gamepad": {"label": "controller"}})
    s.frame("C", False)
    # 10 and 11: hammer and laptop go to C.
    s.move("hammer", 5.6, 1.8, s.next_frame + 1)
    s.move("laptop", 6.4, 1.75, s.next_frame + 1)
    s.frame("A", False)
    s.frame("C", False, masks=("laptop",),
            noise={"laptop": {"description": "silver laptop, lid open"}})
    # 12: green bottle back to A, right next to the white one.
    s.move("green_bottle", 0.3, 2.1, s.next_frame + 1)
    s.frame("C", False)
    s.frame("A", False)
    # 13: blue mug leaves the red one and shows up on C.
    s.move("blue_mug", 6.3, 2.25, s.next_frame)
    s.frame("C", False, noise={"blue_mug": {"description": "blue ceramic mug"}})
    s.frame("A", False)
    # 14: and comes back.
    s.move("blue_mug", 0.15, 2.0, s.next_frame + 1)
    s.frame("C", False)
    s.frame("A", False, noise={"blue_mug": {"label": "cup"}})

    # Removals: the red mug and white bottle vanish beside their look-alikes.
    s.remove("red_mug", s.next_frame + 1)
    s.remove("white_bottle", s.next_frame + 1)
    s.remove("gamepad", s.next_frame + 2)
    s.frame("C", False)
    s.frame("A", False)
    s.frame("B", False)
    return s


def compact_number_lists(text):
    """Puts every list of plain numbers on one line."""
    pattern = re.compile(r"\[\s*(-?[0-9.e+-]+(?:,\s*-?[0-9.e+-]+)*)\s*\]")
    return pattern.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]",
                       text)


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    for build in (level1, level2, level3):
        s = build()
        path = os.path.join(here, s.name + ".json")
        with open(path, "w") as f:
            f.write(compact_number_lists(json.dumps(s.document(), indent=1, sort_keys=True)))
            f.write("\n")
        kinds = [e["kind"] for e in s.events]
        print(f"{s.name}: {len(s.frames)} frames, "
              f"{kinds.count('exists')} objects, {kinds.count('moved')} moves, "
              f"{kinds.count('removed')} removals")


if __name__ == "__main__":
    main()
