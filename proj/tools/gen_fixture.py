#!/usr/bin/env python3
"""Writes the synthetic science-video fixture into data/fixture/.

The output is fully determined by SEED, so re-running it reproduces the
committed files byte for byte.
"""

import json
import random
from pathlib import Path
from xml.sax.saxutils import escape

SEED = 20240917
VIDEO_ID = "BV1fx411c7Nf"
LINE_SECONDS = 6.5

# (topic keyword, transcript sentences)
TOPICS = [
    ("legume", [
        "Welcome back, today we look at how legumes feed themselves with nitrogen from the air.",
        "Peas, beans, clover and soybeans are all legumes.",
        "Legumes grow well in poor soil where other crops struggle.",
        "Farmers noticed centuries ago that legumes leave the soil richer.",
        "The secret of the legume lies underground in its roots.",
        "If you dig up a legume you will see small round lumps on the roots.",
        "Those lumps are the key to the legume story.",
        "Let us find out what the legume is hiding in them.",
        "A legume root looks ordinary until you look closer.",
        "Every legume species forms these lumps in a slightly different shape.",
        "The legume family is one of the largest plant families on Earth.",
        "Without legumes many ecosystems would run short of nitrogen.",
    ]),
    ("nitrogen", [
        "Nitrogen makes up about seventy eight percent of the air we breathe.",
        "Yet plants cannot use nitrogen gas directly.",
        "The two nitrogen atoms are held by a very strong triple bond.",
        "Breaking that triple bond takes a lot of energy.",
        "Plants need nitrogen to build proteins and DNA.",
        "Usable nitrogen comes as ammonium or nitrate in the soil.",
        "Lightning can fix a little nitrogen, but not nearly enough.",
        "So where does most usable nitrogen come from?",
        "The answer is biological nitrogen fixation.",
        "Nitrogen fixation turns nitrogen gas into ammonia.",
        "Only some microbes can perform nitrogen fixation.",
        "The nitrogen cycle depends on these microbes.",
    ]),
    ("rhizobia", [
        "The lumps on legume roots are full of bacteria called rhizobia.",
        "Rhizobia live freely in the soil before they meet a host.",
        "The plant releases flavonoids that attract rhizobia.",
        "Rhizobia answer with signal molecules called Nod factors.",
        "Nod factors tell the root hair to curl around the rhizobia.",
        "An infection thread then carries rhizobia into the root.",
        "Each legume accepts only certain strains of rhizobia.",
        "This chemical conversation between plant and rhizobia is very specific.",
        "Scientists call the partnership with rhizobia a symbiosis.",
        "Rhizobia change shape once inside the root cells.",
        "Inside the root rhizobia become bacteroids.",
        "Bacteroids are rhizobia specialised for fixing nitrogen.",
    ]),
    ("nodule", [
        "The root builds a special organ around the bacteroids called a nodule.",
        "A nodule can be pink inside when it is working well.",
        "The pink colour of the nodule comes from leghemoglobin.",
        "Leghemoglobin in the nodule is similar to the hemoglobin in our blood.",
        "It binds oxygen and keeps the nodule interior low in oxygen.",
        "The nodule needs low oxygen because the enzyme is fragile.",
        "A white or green nodule is usually not fixing nitrogen.",
        "Some legumes make round nodules and others make long ones.",
        "A single plant can carry hundreds of nodules.",
        "The nodule is supplied with sugar by the plant.",
        "In return the nodule exports ammonia to the plant.",
        "The nodule is a little factory built by two partners.",
    ]),
    ("nitrogenase", [
        "The enzyme doing the work is called nitrogenase.",
        "Nitrogenase contains iron and molybdenum at its core.",
        "Nitrogenase is destroyed by oxygen within minutes.",
        "Each nitrogen molecule costs nitrogenase sixteen ATP.",
        "That makes nitrogenase one of the most expensive enzymes in nature.",
        "Nitrogenase also releases hydrogen gas as a side product.",
        "Some rhizobia recycle that hydrogen to save energy.",
        "Chemists still study nitrogenase to learn its tricks.",
        "The iron protein passes electrons to the molybdenum protein.",
        "Nitrogenase works slowly compared with most enzymes.",
        "Plants compensate by making lots of nitrogenase in each nodule.",
        "Understanding nitrogenase could change agriculture.",
    ]),
    ("fertilizer", [
        "Industry fixes nitrogen with the Haber Bosch process.",
        "Haber Bosch needs high temperature and high pressure.",
        "About half of the world's food depends on synthetic fertilizer.",
        "Fertilizer production uses a lot of natural gas.",
        "Excess fertilizer washes into rivers and causes algae blooms.",
        "Legumes in crop rotation reduce the need for fertilizer.",
        "Farmers plant clover before wheat to add nitrogen.",
        "Some researchers want cereals to form nodules too.",
        "Others try to engineer nitrogenase into plant cells.",
        "Fertilizer also releases nitrous oxide, a greenhouse gas.",
        "Better use of rhizobia could cut fertilizer costs.",
        "Inoculating seeds with rhizobia is already common practice.",
    ]),
    ("experiment", [
        "You can see nodules yourself with a simple experiment.",
        "Grow two pots of beans, one in sterile soil and one in garden soil.",
        "After four weeks gently wash the roots.",
        "The garden soil beans will usually have nodules.",
        "Cut a nodule open and check for the pink colour.",
        "Compare the leaf colour of the two pots.",
        "Pale leaves often mean the plant is short of nitrogen.",
        "Record the plant height every week.",
        "Students often find the nodulated beans grow taller.",
        "Try the experiment with peas or clover as well.",
        "Keep the watering identical for a fair comparison.",
        "Share your experiment results in the comments.",
    ]),
    ("summary", [
        "Let us summarise what we learned today.",
        "Legumes partner with rhizobia in root nodules.",
        "Inside the nodule nitrogenase turns nitrogen gas into ammonia.",
        "Leghemoglobin protects nitrogenase from oxygen.",
        "The plant pays for this with sugar.",
        "This symbiosis feeds ecosystems and farms alike.",
        "It also offers a path to using less fertilizer.",
        "Next time you see clover, think of the tiny factories below.",
        "Thanks for watching and see you in the next video.",
        "Remember to subscribe for more plant science.",
        "Leave your questions below and we will answer them.",
        "Goodbye for now.",
    ]),
]

INQUIRY = [
    "why can't plants use {k} directly?",
    "how does the {k} know which bacteria to let in?",
    "what happens to the {k} in winter?",
    "is {k} the same in every country?",
    "does {k} need sunlight?",
    "can you explain {k} again?",
    "what is the difference between {k} and nitrate?",
    "{k}为什么这么重要？",
]
EXPERIENCE = [
    "I grew beans last year and my plants had {k} everywhere",
    "my grandfather always planted clover for the {k}",
    "I saw {k} in my biology class, we cut them open",
    "when I was a kid I thought {k} was a disease",
    "my garden soil has lots of {k}, I never knew why",
    "I tried this experiment at school and my {k} results matched",
]
CONCEPT = [
    "{K}",
    "{k} symbiosis",
    "\"{k}\"",
    "{K} = key",
    "Nod factor",
    "Haber-Bosch",
    "leghemoglobin",
    "根瘤菌",
    "固氮",
]
SUPPLEMENT = [
    "fun fact: {k} was first described in the 1880s",
    "{k} refers to the partnership between plant and microbe",
    "in addition, some trees like alder also fix nitrogen with Frankia",
    "actually {k} also happens in free-living cyanobacteria",
    "also worth knowing: soybeans get most of their nitrogen this way",
    "note that {k} activity drops in cold soil",
]
OPINION_POS = [
    "this explanation of {k} is amazing",
    "I love how clear the {k} part is",
    "great video, the {k} animation is beautiful",
    "so interesting, {k} is fascinating",
]
OPINION_NEU = [
    "I think {k} would matter more in poor soil",
    "maybe {k} explains why clover grows everywhere",
    "probably {k} is the most important part",
    "seems like {k} is a trade between partners",
]
OPINION_NEG = [
    "I think the {k} part was confusing",
    "the {k} section is too fast, I don't get it",
    "the {k} explanation is wrong in my opinion",
]
NOISE = [
    "哈哈哈哈",
    "666",
    "awsl",
    "前排",
    "????",
    "lol",
    "up主好帅",
    "第一",
    "233333",
    "hhhh",
]

FAMILIES = [
    (INQUIRY, 0.12),
    (EXPERIENCE, 0.10),
    (CONCEPT, 0.12),
    (SUPPLEMENT, 0.10),
    (OPINION_POS, 0.13),
    (OPINION_NEU, 0.13),
    (OPINION_NEG, 0.06),
    (NOISE, 0.24),
]


def srt_time(seconds):
    ms = int(round(seconds * 1000))
    h, rem = divmod(ms, 3600000)
    m, rem = divmod(rem, 60000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def build_transcript():
    lines = []
    t = 0.0
    spans = []
    for keyword, sentences in TOPICS:
        start = t
        for sentence in sentences:
            lines.append((t, t + LINE_SECONDS - 0.3, sentence))
            t += LINE_SECONDS
        spans.append((keyword, start, t))
    return lines, spans, t


def topic_at(spans, t):
    for keyword, start, end in spans:
        if start <= t < end:
            return keyword
    return spans[-1][0]


def pick_family(rng):
    x = rng.random()
    acc = 0.0
    for family, weight in FAMILIES:
        acc += weight
        if x < acc:
            return family
    return FAMILIES[-1][0]


def build_danmaku(spans, duration, rng, count=360):
    items = []
    for i in range(count):
        t = round(rng.uniform(1.0, duration - 1.0), 3)
        keyword = topic_at(spans, t)
        template = rng.choice(pick_family(rng))
        text = template.format(k=keyword, K=keyword.capitalize())
        mode = rng.choice([1, 1, 1, 4, 5])
        color = rng.choice([16777215, 16777215, 16711680, 65280, 16776960])
        posted = 1700000000 + rng.randrange(0, 86400 * 30)
        user = f"{rng.getrandbits(32):08x}"
        items.append((t, mode, color, posted, user, 900000 + i, text))
    # Repeat a few popular comments so clusters form.
    for j in range(24):
        base = items[rng.randrange(len(items))]
        t = round(min(duration - 0.5, base[0] + rng.uniform(0.2, 6.0)), 3)
        items.append((t, 1, 16777215, base[3] + 7, f"{rng.getrandbits(32):08x}",
                      800000 + j, base[6]))
    return items


def main():
    root = Path(__file__).resolve().parent.parent / "data" / "fixture"
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    lines, spans, total = build_transcript()
    duration = round(total + 2.0, 3)

    with open(root / "transcript.srt", "w", encoding="utf-8", newline="\n") as f:
        for i, (start, end, text) in enumerate(lines, start=1):
            f.write(f"{i}\n{srt_time(start)} --> {srt_time(end)}\n{text}\n\n")

    meta = {
        "video_id": VIDEO_ID,
        "title": "How legumes pull nitrogen out of thin air",
        "duration": duration,
        "domain_tag": "biology",
    }
    with open(root / "meta.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(meta, f, ensure_ascii=False, indent=2)
        f.write("\n")

    items = build_danmaku(spans, duration, rng)
    with open(root / "danmaku.xml", "w", encoding="utf-8", newline="\n") as f:
        f.write('<?xml version="1.0" encoding="UTF-8"?>\n<i>\n')
        f.write(f"  <chatid>{VIDEO_ID}</chatid>\n")
        for t, mode, color, posted, user, row, text in items:
            p = f"{t:.3f},{mode},25,{color},{posted},0,{user},{row}"
            f.write(f'  <d p="{p}">{escape(text)}</d>\n')
        f.write("</i>\n")

    print(f"{len(lines)} transcript lines, {duration:.1f} s, {len(items)} danmaku")


if __name__ == "__main__":
    main()
