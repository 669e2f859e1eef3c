"""Writes stats_fixture.jsonl and the expected statistics in stats_expected.json.

Word counts follow the shared rule: lowercase, split on whitespace, strip
ASCII punctuation from both ends of each token, drop empty tokens.
"""
import json
import string
from collections import Counter
from pathlib import Path

here = Path(__file__).parent
BIN = 10


def words(text):
    return sum(1 for t in text.split() if t.strip(string.punctuation))


def cap(dense, **more):
    c = {"dense": dense}
    c.update(more)
    return c


def cond(kind, ref, summary=None):
    c = {"type": kind}
    if kind == "identities":
        c["refs"] = ref
    else:
        c["ref"] = ref
    if summary:
        c["summary"] = summary
    return c


records = [
    ("d1", 8.0, "depth", [cond("depth", "d1.depth")],
     "A man walks along a pier at dusk.",
     cap("A middle-aged man walks slowly along a wooden pier as the sun sets - gulls circle overhead.",
         background="The pier stretches into calm water under an orange sky.")),
    ("d2", 12.5, "depth", [cond("depth", "d2.depth")],
     "Kids play football in a park.",
     cap("Three children kick a red ball across a grassy park, laughing and shouting.",
         camera="Static wide shot at eye level.")),
    ("d3", 4.5, "depth", [cond("depth", "d3.depth")],
     "A cat sleeps on a windowsill.",
     cap("A grey cat sleeps curled on a sunny windowsill; its tail twitches now and then.")),
    ("p1", 10.0, "human_pose", [cond("pose", "p1.pose", "a dancer spins twice")],
     "A dancer spins on stage.",
     cap("A dancer in a white dress spins twice on a dark stage under a single spotlight.",
         action="She raises both arms, spins, and bows.", style="Theatrical, high contrast.")),
    ("p2", 6.0, "human_pose", [cond("pose", "p2.pose")],
     "A runner stretches before a race.",
     cap("A runner in a blue vest stretches her legs beside a running track.")),
    ("m1", 9.0, "multi_identities", [cond("identities", ["m1_a.png", "m1_b.png"])],
     "Two friends share a meal.",
     cap("Two friends sit at a small cafe table and share a plate of pasta while chatting.",
         main_object="A young woman with short hair and a man with glasses.")),
    ("m2", 7.5, "multi_identities", [cond("identities", ["m2_a.png", "m2_b.png", "m2_c.png"])],
     "A family poses for a photo.",
     cap("A mother, father and daughter stand close together and smile at the camera in a garden.")),
    ("m3", 5.0, "multi_identities", [cond("identities", ["m3_a.png", "m3_b.png"])],
     "A dog greets its owner.",
     cap("A golden dog runs to its owner at the front door and jumps up happily . . .")),
    ("c1", 11.0, "camera", [cond("camera", "c1.traj", "camera pans right")],
     "The camera pans across a city skyline.",
     cap("The skyline of a large city glitters at night as the view pans from left to right.",
         camera="Slow pan right from a high vantage point.")),
    ("c2", 3.0, "camera", [cond("camera", "c2.traj")],
     "Zoom into a flower.",
     cap("A single red tulip sways in the wind; the view moves steadily closer to its petals.")),
    ("x1", 14.0, "compositional", [cond("depth", "x1.depth"), cond("camera", "x1.traj")],
     "A cyclist rides down a mountain road, filmed from behind.",
     cap("A cyclist in a yellow jacket rides down a winding mountain road, followed from behind.",
         camera="Tracking shot from behind at a steady distance.",
         background="Pine forest and distant snowy peaks.")),
    ("x2", 9.5, "compositional",
     [cond("identities", ["x2_a.png", "x2_b.png"]), cond("pose", "x2.pose")],
     "Two boxers spar in a gym.",
     cap("Two boxers in red and blue gloves spar in a crowded gym, trading quick jabs.",
         action="They circle, jab, and block.")),
]

ORDER = ["dense", "main_object", "background", "camera", "style", "action"]
lines, stats = [], {}
short_hist, struct_hist, ids = Counter(), Counter(), Counter()
total = {"instances": 0, "conditions": 0, "duration_s": 0.0, "short_words": 0, "structured_words": 0}
for rid, dur, category, conds, short, sc in records:
    lines.append(json.dumps({"id": rid, "video_ref": rid + ".mp4", "duration_s": dur, "category": category,
                             "conditions": conds, "short_caption": short, "structured_caption": sc}))
    n_cond = sum(len(c["refs"]) if c["type"] == "identities" else 1 for c in conds)
    sw = words(short)
    tw = words("\n".join(sc[k] for k in ORDER if k in sc))
    row = stats.setdefault(category, {"instances": 0, "conditions": 0, "duration_s": 0.0,
                                      "short_words": 0, "structured_words": 0})
    for t in (row, total):
        t["instances"] += 1
        t["conditions"] += n_cond
        t["duration_s"] += dur
        t["short_words"] += sw
        t["structured_words"] += tw
    short_hist[sw // BIN * BIN] += 1
    struct_hist[tw // BIN * BIN] += 1
    if category == "multi_identities":
        ids[n_cond] += 1

(here / "stats_fixture.jsonl").write_text("\n".join(lines) + "\n")
expected = {"per_category": stats, "total": total, "bin_width": BIN,
            "short_hist": sorted(short_hist.items()), "structured_hist": sorted(struct_hist.items()),
            "identities_per_instance": sorted(ids.items())}
(here / "stats_expected.json").write_text(json.dumps(expected, indent=1) + "\n")
print(json.dumps(expected))
