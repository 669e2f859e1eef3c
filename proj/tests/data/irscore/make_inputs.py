"""Writes gt.jsonl, pred.jsonl and script.json for the IRScore replay fixture.

The script lists, per record, the intents and QA pairs a scripted judge hands
out. judge_cache.jsonl is then produced by the anycap_record_ir_fixture tool.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent

RECORDS = [
    {
        "id": "ir01", "category": "multi_identities",
        "conditions": [{"type": "identities", "refs": ["ir01_woman.png"], "summary": "one young woman with long hair"}],
        "short": "A young woman walks down a corridor adjusting her hat while the camera follows.",
        "gt": {
            "dense": "A young woman with long hair, wearing a light blue T-shirt with pink lettering, blue jeans and a wide-brimmed hat, walks down a corridor in daytime, adjusting her hat and smiling, happy and carefree.",
            "main_object": "The young woman wears a light blue T-shirt with pink lettering, blue jeans, and a wide-brimmed hat; her hair is long.",
            "background": "She is walking down a corridor with beige walls and large windows; the scene is set in daytime.",
            "camera": "The camera is moving backward to follow her at roughly the same height as the person, holding a medium close-up shot of the upper body.",
            "style": "Bright natural light, warm and airy.",
            "action": "She walks forward and adjusts her wide-brimmed hat with one hand.",
        },
        "pred": {
            "dense": "A woman in a light blue T-shirt walks down a corridor during the daytime, adjusting her wide-brimmed hat. She looks happy and carefree.",
            "camera": "The camera is moving backward in front of her.",
            "background": "Beige walls and large windows line the corridor.",
        },
        "intents": [["subject", "the young woman and her outfit"], ["background", "corridor setting"],
                    ["camera", "camera follows her backward"], ["movement", "walking while adjusting the hat"]],
        "qa": {
            "subject": [["What is the young woman adjusting as she walks down the corridor?", "Her wide-brimmed hat."],
                        ["What color is the young woman's T-shirt?", "Light blue."],
                        ["How does the young woman feel as she walks down the corridor?", "Happy and carefree."],
                        ["What is the young woman wearing?", "Light blue t-shirt with pink lettering, blue jeans, and a wide-brimmed hat."],
                        ["What is the young woman's hair length?", "Long."]],
            "background": [["Where is the young woman walking?", "Down a corridor."],
                           ["What time of day does the scene appear to be set?", "Daytime."],
                           ["What can be seen in the background of the corridor?", "Beige walls and large windows."]],
            "camera": [["How does the camera follow the young woman?", "Moving backward"],
                       ["What is the camera's height relative to the person?", "Roughly the same height as the person."],
                       ["What shot type does the camera maintain?", "Medium close-up shot of the upper body."]],
            "movement": [["What does the young woman do with her hand while walking?", "Adjusts her hat."]],
        },
    },
    {
        "id": "ir02", "category": "camera",
        "conditions": [{"type": "camera", "ref": "ir02.traj", "summary": "slow dolly in toward the table"}],
        "short": "A chef plates pasta in a busy kitchen; the camera slowly pushes in.",
        "gt": {
            "dense": "A chef in a white jacket plates spaghetti with tomato sauce on a white dish in a busy restaurant kitchen while steam rises from pots behind him.",
            "main_object": "A bearded chef in a white jacket and black apron.",
            "background": "A busy stainless steel kitchen with steaming pots and other cooks.",
            "camera": "The camera slowly dollies in from a medium shot to a close-up of the plate.",
            "style": "Warm tungsten light, shallow depth of field.",
            "action": "He twirls the spaghetti with tongs, places it on the dish and spoons sauce on top.",
        },
        "pred": {
            "dense": "A chef in a white jacket plates spaghetti in a kitchen with steaming pots.",
            "camera": "The camera slowly dollies in toward the plate.",
            "action": "He places the spaghetti on the dish with tongs.",
        },
        "intents": [["subject", "the chef"], ["camera", "push in"], ["movement", "plating"], ["style", "warm light"]],
        "qa": {
            "subject": [["What is the chef wearing?", "A white jacket and black apron."],
                        ["Does the chef have a beard?", "Yes, a beard."]],
            "camera": [["How does the camera move?", "Slowly dollies in."],
                       ["What does the shot end on?", "A close-up of the plate."]],
            "movement": [["What dish is the chef plating?", "Spaghetti."],
                         ["What tool does the chef use?", "Tongs."]],
            "style": [["What kind of light is used?", "Warm tungsten light."]],
        },
    },
    {
        "id": "ir03", "category": "human_pose",
        "conditions": [{"type": "pose", "ref": "ir03.pose", "summary": "a dancer leaps and lands"}],
        "short": "A ballet dancer leaps across an empty studio.",
        "gt": {
            "dense": "A ballet dancer in a black leotard leaps across an empty wooden studio floor, lands softly and raises her arms.",
            "main_object": "A slim ballet dancer in a black leotard and pink tights.",
            "background": "An empty studio with a wooden floor, a mirror wall and a barre.",
            "camera": "A static wide shot from the corner of the room.",
            "style": "Soft diffuse daylight, muted colors.",
            "action": "She runs three steps, leaps, lands on one foot and raises both arms.",
        },
        "pred": {
            "dense": "A dancer in a black leotard jumps across a studio with a mirror wall.",
            "action": "She leaps and lands, then raises both arms.",
        },
        "intents": [["subject", "the dancer"], ["background", "studio"], ["movement", "the leap"], ["camera", "static wide"]],
        "qa": {
            "subject": [["What is the dancer wearing?", "A black leotard and pink tights."]],
            "background": [["What is on the studio wall?", "A mirror wall and a barre."],
                           ["What is the floor made of?", "Wood."]],
            "movement": [["What does the dancer do after landing?", "Raises both arms."],
                         ["How many steps does she run before leaping?", "Three steps."]],
            "camera": [["What kind of shot is used?", "A static wide shot."]],
        },
    },
    {
        "id": "ir04", "category": "depth",
        "conditions": [{"type": "depth", "ref": "ir04.depth", "summary": "a road receding toward mountains"}],
        "short": "A red car drives along a mountain road at sunset.",
        "gt": {
            "dense": "A red convertible drives along a winding mountain road at sunset, passing pine trees as snowy peaks glow orange in the distance.",
            "main_object": "A red convertible with its roof down.",
            "background": "A winding road through pine trees with snowy peaks in the distance.",
            "camera": "An aerial tracking shot following the car from behind and above.",
            "style": "Golden hour light, saturated orange and blue tones.",
            "action": "The car takes a left curve and accelerates uphill.",
        },
        "pred": {
            "dense": "A red convertible drives on a winding mountain road at sunset.",
            "camera": "An aerial shot tracks the car from above.",
            "style": "Golden hour light.",
        },
        "intents": [["subject", "the car"], ["background", "mountain road"], ["camera", "aerial tracking"], ["style", "sunset"]],
        "qa": {
            "subject": [["What kind of car is shown?", "A red convertible."],
                        ["Is the roof of the car up or down?", "Down."]],
            "background": [["What trees line the road?", "Pine trees."],
                           ["What is visible in the distance?", "Snowy peaks."]],
            "camera": [["From where does the camera film the car?", "From above, aerial tracking."]],
            "style": [["What time of day is it?", "Sunset."],
                      ["What light dominates the scene?", "Golden hour light."]],
        },
    },
    {
        "id": "ir05", "category": "multi_identities",
        "conditions": [{"type": "identities", "refs": ["ir05_a.png", "ir05_b.png"], "summary": "two scientists in lab coats"}],
        "short": "Two scientists discuss results in a laboratory.",
        "gt": {
            "dense": "Two scientists in white lab coats stand at a bench in a bright laboratory; the older man points at a monitor while the young woman takes notes.",
            "main_object": "An older man with grey hair and glasses, and a young woman with a ponytail, both in white lab coats.",
            "background": "A bright laboratory with glassware, a fume hood and a monitor showing graphs.",
            "camera": "A slow pan from left to right at eye level, medium shot.",
            "style": "Clean, cool white light.",
            "action": "He points at the monitor and speaks; she nods and writes in a notebook.",
        },
        "pred": {
            "dense": "Two scientists in white lab coats talk in a laboratory. The man points at a monitor and the woman writes in a notebook.",
            "main_object": "A man with glasses and a woman with a ponytail.",
        },
        "intents": [["subject", "two scientists"], ["interaction", "discussion at the monitor"], ["camera", "pan"]],
        "qa": {
            "subject": [["How many people are in the scene?", "Two scientists."],
                        ["What does the man wear on his face?", "Glasses."],
                        ["How is the woman's hair styled?", "A ponytail."]],
            "interaction": [["What does the man point at?", "A monitor."],
                            ["What does the woman do while he talks?", "Writes in a notebook."]],
            "camera": [["How does the camera move?", "A slow pan from left to right."]],
        },
    },
    {
        "id": "ir06", "category": "camera",
        "conditions": [{"type": "camera", "ref": "ir06.traj", "summary": "orbit around the subject"}],
        "short": "A shark swims through a coral reef as the camera circles it.",
        "gt": {
            "dense": "A grey reef shark glides slowly over a colorful coral reef in clear turquoise water while small yellow fish scatter.",
            "main_object": "A grey reef shark with a pale belly.",
            "background": "A colorful coral reef in clear turquoise water with small yellow fish.",
            "camera": "The camera orbits around the shark at the same depth.",
            "style": "Underwater, blue green color palette, shafts of sunlight.",
            "action": "The shark glides forward and turns left.",
        },
        "pred": {
            "dense": "A shark swims over a reef in the ocean.",
            "camera": "The camera follows the shark.",
        },
        "intents": [["subject", "the shark"], ["background", "reef"], ["camera", "orbit"], ["style", "underwater light"]],
        "qa": {
            "subject": [["What animal is shown?", "A grey reef shark."]],
            "background": [["What color is the water?", "Clear turquoise."],
                           ["What fish scatter around the shark?", "Small yellow fish."]],
            "camera": [["How does the camera move around the shark?", "It orbits around the shark."]],
            "style": [["What light pattern appears underwater?", "Shafts of sunlight."]],
        },
    },
    {
        "id": "ir07", "category": "human_pose",
        "conditions": [{"type": "pose", "ref": "ir07.pose", "summary": "a runner sprinting"}],
        "short": "An athlete sprints on a track in the rain.",
        "gt": {
            "dense": "A sprinter in a yellow vest races down a wet red running track in heavy rain, splashing water with every stride.",
            "main_object": "A muscular sprinter in a yellow vest and black shorts.",
            "background": "A wet red running track in an empty stadium, heavy rain.",
            "camera": "A low-angle side tracking shot moving alongside the runner.",
            "style": "Overcast, desaturated, slow motion.",
            "action": "He sprints forward, arms pumping, water splashing under his spikes.",
        },
        "pred": {
            "dense": "A sprinter in a yellow vest runs down a wet red track in heavy rain.",
            "camera": "A low-angle tracking shot moves alongside the runner.",
            "style": "Slow motion, desaturated.",
            "action": "He sprints with arms pumping.",
        },
        "intents": [["subject", "the sprinter"], ["background", "rainy track"], ["movement", "sprinting"], ["camera", "side tracking"], ["style", "slow motion"]],
        "qa": {
            "subject": [["What color is the sprinter's vest?", "Yellow."]],
            "background": [["What is the weather like?", "Heavy rain."],
                           ["What color is the track?", "Red."]],
            "movement": [["How do the runner's arms move?", "Arms pumping."]],
            "camera": [["What angle is the shot taken from?", "A low-angle side tracking shot."]],
            "style": [["Is the footage played at normal speed?", "Slow motion."]],
        },
    },
    {
        "id": "ir08", "category": "depth",
        "conditions": [{"type": "depth", "ref": "ir08.depth", "summary": "a narrow alley with depth falling away"}],
        "short": "A cat walks through a narrow alley at night.",
        "gt": {
            "dense": "A black cat walks down a narrow cobblestone alley at night, lit by a single yellow street lamp, past stacked wooden crates.",
            "main_object": "A black cat with green eyes.",
            "background": "A narrow cobblestone alley with wooden crates and a yellow street lamp.",
            "camera": "A static low shot at ground level.",
            "style": "Noir, high contrast, deep shadows.",
            "action": "The cat walks toward the camera, pauses and looks up.",
        },
        "pred": {
            "dense": "A dog runs through a street during the day.",
        },
        "intents": [["subject", "the cat"], ["background", "alley at night"], ["style", "noir"]],
        "qa": {
            "subject": [["What animal walks through the alley?", "A black cat."],
                        ["What color are the cat's eyes?", "Green."]],
            "background": [["What is the alley paved with?", "Cobblestone."],
                           ["What lights the alley?", "A single yellow street lamp."]],
            "style": [["What is the visual style?", "Noir, high contrast."]],
        },
    },
    {
        "id": "ir09", "category": "compositional",
        "conditions": [{"type": "depth", "ref": "ir09.depth", "summary": "a lake in front of a forest"},
                       {"type": "camera", "ref": "ir09.traj", "summary": "rising crane shot"}],
        "short": "A man rows a wooden boat across a misty lake at dawn; the camera rises.",
        "gt": {
            "dense": "An old man in a green raincoat rows a small wooden boat across a misty lake at dawn, with a pine forest on the far shore.",
            "main_object": "An old man in a green raincoat and a small wooden boat.",
            "background": "A misty lake at dawn with a pine forest on the far shore.",
            "camera": "A crane shot rising slowly to reveal the whole lake.",
            "style": "Soft pastel colors, calm mood.",
            "action": "He pulls the oars in steady strokes.",
        },
        "pred": {
            "dense": "An old man in a green raincoat rows a wooden boat across a misty lake at dawn.",
            "camera": "The camera rises slowly in a crane shot.",
            "action": "He rows with steady strokes.",
        },
        "intents": [["subject", "the rower"], ["background", "misty lake"], ["movement", "rowing"], ["camera", "crane up"]],
        "qa": {
            "subject": [["What is the man wearing?", "A green raincoat."],
                        ["What is the boat made of?", "Wood."]],
            "background": [["What is on the far shore?", "A pine forest."],
                           ["What time of day is it?", "Dawn."]],
            "movement": [["How does the man row?", "Steady strokes."]],
            "camera": [["How does the camera move?", "Rises slowly in a crane shot."]],
        },
    },
    {
        "id": "ir10", "category": "compositional",
        "conditions": [{"type": "identities", "refs": ["ir10_a.png", "ir10_b.png"], "summary": "a father and a small boy"},
                       {"type": "pose", "ref": "ir10.pose", "summary": "two people flying a kite"}],
        "short": "A father and son fly a kite on a windy beach.",
        "gt": {
            "dense": "A father and his young son fly a red diamond kite on a windy sandy beach; the boy holds the string while the father steadies his hands.",
            "main_object": "A tall man in a grey sweater and a small boy in a blue jacket.",
            "background": "A wide sandy beach with rolling waves under a cloudy sky.",
            "camera": "A handheld medium shot circling slightly around them.",
            "style": "Natural light, cool tones, windy atmosphere.",
            "action": "The boy runs a few steps, the kite lifts, and the father laughs.",
        },
        "pred": {
            "dense": "A man and a boy fly a red kite on a sandy beach with waves.",
            "main_object": "A man in a grey sweater and a boy in a blue jacket.",
            "action": "The boy holds the string and the kite lifts.",
        },
        "intents": [["subject", "father and son"], ["interaction", "flying the kite together"], ["background", "beach"]],
        "qa": {
            "subject": [["What is the boy wearing?", "A blue jacket."],
                        ["What color is the kite?", "Red."]],
            "interaction": [["Who holds the kite string?", "The boy holds the string."],
                            ["What does the father do with the boy's hands?", "Steadies his hands."]],
            "background": [["What is the sky like?", "Cloudy sky."],
                           ["Where are they?", "A sandy beach."]],
        },
    },
    {
        "id": "ir11", "category": "camera",
        "conditions": [{"type": "camera", "ref": "ir11.traj", "summary": "fast forward push through a street"}],
        "short": "A cyclist rides through a crowded city street.",
        "gt": {
            "dense": "A cyclist in an orange helmet weaves through a crowded city street past yellow taxis and pedestrians on a sunny afternoon.",
            "main_object": "A cyclist in an orange helmet and a grey hoodie on a black bike.",
            "background": "A crowded city street with yellow taxis, pedestrians and tall buildings.",
            "camera": "A fast forward push following the cyclist from behind.",
            "style": "Bright sunlight, vivid colors, energetic.",
            "action": "He weaves left and right between taxis.",
        },
        "pred": {
            "dense": "A cyclist in an orange helmet rides between yellow taxis in a city street.",
            "camera": "A fast push from behind the cyclist.",
            "style": "Sunny and vivid.",
        },
        "intents": [["subject", "the cyclist"], ["background", "city traffic"], ["camera", "fast push"], ["movement", "weaving"]],
        "qa": {
            "subject": [["What color is the cyclist's helmet?", "Orange."]],
            "background": [["What vehicles are on the street?", "Yellow taxis."],
                           ["What time of day is it?", "A sunny afternoon."]],
            "camera": [["Where is the camera relative to the cyclist?", "Behind the cyclist."]],
            "movement": [["How does the cyclist move through traffic?", "Weaves left and right."]],
        },
    },
    {
        "id": "ir12", "category": "multi_identities",
        "conditions": [{"type": "identities", "refs": ["ir12_a.png"], "summary": "an elderly violinist"}],
        "short": "An elderly musician plays the violin on a bridge.",
        "gt": {
            "dense": "An elderly musician with a white beard plays the violin on a stone bridge over a river as the evening lights come on.",
            "main_object": "An elderly man with a white beard in a brown coat and flat cap.",
            "background": "A stone bridge over a river with city lights in the evening.",
            "camera": "A slow dolly out from a close-up of his hands to a wide shot.",
            "style": "Blue hour, warm street lamps, melancholic.",
            "action": "He draws the bow slowly and sways with the music.",
        },
        "pred": {
            "dense": "An elderly man with a white beard plays the violin on a stone bridge in the evening.",
            "main_object": "He wears a brown coat and a flat cap.",
            "camera": "The camera slowly pulls back from his hands to a wide shot.",
            "style": "Melancholic blue hour.",
        },
        "intents": [["subject", "the violinist"], ["background", "bridge at evening"], ["camera", "dolly out"], ["style", "mood"]],
        "qa": {
            "subject": [["What instrument does the man play?", "The violin."],
                        ["What is on the man's head?", "A flat cap."]],
            "background": [["Where is the musician playing?", "On a stone bridge."],
                           ["What flows under the bridge?", "A river."]],
            "camera": [["How does the camera move?", "A slow dolly out to a wide shot."]],
            "style": [["What is the mood of the scene?", "Melancholic."]],
        },
    },
]


def main():
    with open(HERE / "gt.jsonl", "w") as gt, open(HERE / "pred.jsonl", "w") as pred:
        for r in RECORDS:
            gt.write(json.dumps({
                "id": r["id"], "video_ref": r["id"] + ".mp4", "duration_s": 8.0, "category": r["category"],
                "conditions": r["conditions"], "short_caption": r["short"], "structured_caption": r["gt"],
            }) + "\n")
            pred.write(json.dumps({"id": r["id"], "structured_caption": r["pred"]}) + "\n")
    script = {
        "records": [
            {"id": r["id"],
             "intents": [{"aspect": a, "note": n} for a, n in r["intents"]],
             "qa": {a: [{"question": q, "answer": ans} for q, ans in pairs] for a, pairs in r["qa"].items()},
             # The judge's first reply when grading this question is malformed.
             **({"malformed_grade_question": "How many people are in the scene?"} if r["id"] == "ir05" else {})}
            for r in RECORDS
        ]
    }
    (HERE / "script.json").write_text(json.dumps(script, indent=1) + "\n")


if __name__ == "__main__":
    main()
