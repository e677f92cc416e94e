#!/usr/bin/env python3
"""Regenerate the bundled fixture data under data/.

Every file written here is synthetic: moments are assembled from hand-written
phrase templates, and labels come from the template that produced each moment
(never from the keyword lexicons the system under test uses). The RNG is
seeded, so re-running the script reproduces the committed files byte for byte.

    python3 scripts/generate_fixtures.py [--out data]
"""

import argparse
import json
import math
import random
import re
from pathlib import Path

# ---------------------------------------------------------------------------
# people
# ---------------------------------------------------------------------------

FAMILY = ["my mom", "my dad", "my parents", "my kids", "my sister", "my brother",
          "my grandma", "my son", "my daughter", "my cousin", "my family", "my grandparents"]
FRIENDS = ["my best friend", "a friend", "my friends", "my roommate", "my neighbor",
           "some friends", "an old friend", "Sarah", "Mike", "Jessica", "David", "Priya", "Tom"]
PARTNER = ["my boyfriend", "my girlfriend", "my wife", "my husband", "my partner"]
WORK = ["my coworkers", "my team", "my boss", "a colleague"]

TIMES = ["this morning", "today", "after work", "last night", "this afternoon",
         "on Saturday", "yesterday", "this evening", "on Sunday", "during lunch break"]

POS_CLOSERS = ["", "", "", " and it felt great", " which made my day",
               ". It was so much fun", " and I felt really good", ". I loved it",
               " and I am so happy about it", ". Such a good day"]


def companion(rng, kinds=("family", "friends", "partner", None)):
    kind = rng.choice(kinds)
    if kind == "family":
        return rng.choice(FAMILY), ["Family"]
    if kind == "friends":
        return rng.choice(FRIENDS), ["Socializing"]
    if kind == "partner":
        return rng.choice(PARTNER), ["Romance"]
    if kind == "work":
        return rng.choice(WORK), ["Teamwork"]
    return None, []


def opener(rng):
    return rng.choice(["I ", "I ", "I ", "Finally ", "Today I ", "This morning I "])


def finish(text, rng, closers=POS_CLOSERS):
    if text.startswith("This morning "):
        for t in TIMES:
            text = text.replace(" " + t, "")
    text = text.strip()
    text = re.sub(r"\s+", " ", text)
    text = text[0].upper() + text[1:]
    text += rng.choice(closers)
    if rng.random() < 0.6:
        text += rng.choice([".", ".", "!"])
    return text


def maybe_time(rng, p=0.6):
    return " " + rng.choice(TIMES) if rng.random() < p else ""


# ---------------------------------------------------------------------------
# activity moments
# ---------------------------------------------------------------------------

EX_SEEDED = [
    "went for a run", "went for a {dist} run", "ran {dist}s", "did yoga", "did some yoga",
    "went for a long walk", "walked around the lake", "went biking", "rode my bike",
    "lifted weights at the gym", "played football", "played soccer", "played basketball",
    "played tennis", "went swimming", "swam laps at the pool", "had a great workout",
    "went to the gym", "took a yoga class", "went on a bike ride", "walked the dog",
]
EX_EXPANDED = [
    "went jogging", "jogged around the park", "went hiking in the mountains",
    "hiked a new trail", "went cycling", "did pilates", "sprinted up the hill",
    "went climbing", "did a spin class", "went rowing on the river", "went skiing",
]
EX_DURATIONS = ["", "", " for an hour", " for 30 minutes", " for 45 minutes",
                " for two hours", " for half an hour", " for 20 minutes"]
EX_CONFOUNDERS = [
    ("watched football on TV", ["Leisure"]),
    ("watched the basketball game", ["Leisure"]),
    ("watched the tennis final", ["Leisure"]),
    ("bought new running shoes", ["Leisure"]),
    ("bought a new bike", ["Exciting experiences"]),
    ("got tickets to the soccer match", ["Exciting experiences"]),
    ("watched a football game with {c}", []),
    ("watched {c} play soccer", []),
]


def exercise_moment(rng, expanded=False):
    template = rng.choice(EX_EXPANDED if expanded else EX_SEEDED)
    core = template.replace("{dist}", rng.choice(["5 mile", "3 mile", "10k", "2 mile"]))
    values = ["Physical well-being"]
    if any(w in core for w in ("yoga", "hiking", "hiked", "walk")) and rng.random() < 0.5:
        values.append("Mindfulness")
    who, extra = companion(rng, ("family", "friends", "partner", None, None, None))
    text = opener(rng) + core
    if "{dist}" not in template:
        text += rng.choice(EX_DURATIONS)
    if who:
        text += " with " + who
        values += extra
    text += maybe_time(rng)
    return finish(text, rng), "Exercise", values


def exercise_confounder(rng):
    core, values = rng.choice(EX_CONFOUNDERS)
    values = list(values)
    if "{c}" in core:
        who, extra = companion(rng, ("family", "friends"))
        core = core.replace("{c}", who)
        values += extra + ["Leisure"]
    text = opener(rng) + core + maybe_time(rng)
    return finish(text, rng), None, values


MEAL_SEEDED = ["had dinner", "had a great dinner", "had lunch", "had breakfast",
               "grabbed lunch", "went out for brunch", "cooked dinner", "made breakfast",
               "had a nice meal", "had a delicious dinner", "enjoyed a long lunch",
               "ate breakfast", "had a family dinner", "shared a meal"]
MEAL_EXPANDED = ["had a barbecue", "went to a picnic", "had supper", "had a feast",
                 "went to a potluck", "hosted a cookout"]
MEAL_PLACES = ["", "", " at our favorite restaurant", " at home", " at a new Thai place",
               " in the backyard", " downtown"]
MEAL_CONFOUNDERS = [
    ("skipped lunch to finish my report", ["Important accomplishment"]),
    ("missed breakfast because I overslept", ["Self-compassion"]),
    ("bought groceries for dinner", ["Leisure"]),
    ("skipped dinner and went straight to bed", ["Self-compassion"]),
]


def meal_moment(rng, expanded=False):
    core = rng.choice(MEAL_EXPANDED if expanded else MEAL_SEEDED)
    who, extra = companion(rng, ("family", "family", "friends", "partner", None))
    values = list(extra)
    text = opener(rng) + core
    if who:
        text += " with " + who
    else:
        values.append("Leisure")
    text += rng.choice(MEAL_PLACES) + maybe_time(rng, 0.4)
    return finish(text, rng), "Meals", values


def meal_confounder(rng):
    core, values = rng.choice(MEAL_CONFOUNDERS)
    return finish(opener(rng) + core + maybe_time(rng), rng), None, list(values)


CONV_SEEDED = ["had a long talk with {c}", "talked with {c} on the phone",
               "chatted with {c}", "had a great conversation with {c}", "called {c}",
               "had a meeting with {c}", "talked to {c} about our plans",
               "had a deep conversation with {c}", "chatted with {c} over coffee",
               "called {c} to catch up", "had a video call with {c}"]
CONV_EXPANDED = ["discussed our summer plans with {c}", "gossiped with {c}",
                 "texted with {c} for hours", "spoke with {c} for a while",
                 "had a heart to heart with {c}"]
CONV_CONFOUNDERS = [
    ("watched a talk show", ["Leisure"]),
    ("listened to a podcast about how to talk to kids", ["Learning"]),
    ("the meeting got cancelled so I went home early", ["Self-compassion"]),
    ("watched a late night talk show with {c}", []),
]


def conversation_moment(rng, expanded=False):
    core = rng.choice(CONV_EXPANDED if expanded else CONV_SEEDED)
    who, extra = companion(rng, ("family", "friends", "friends", "partner", "work"))
    values = list(extra)
    if "deep" in core or "heart to heart" in core:
        values.append("Emotional Intimacy")
    text = opener(rng) + core.replace("{c}", who) + maybe_time(rng, 0.5)
    return finish(text, rng), "Conversation", values


def conversation_confounder(rng):
    core, values = rng.choice(CONV_CONFOUNDERS)
    values = list(values)
    if "{c}" in core:
        who, extra = companion(rng, ("family", "friends", "partner"))
        core = core.replace("{c}", who)
        values += extra + ["Leisure"]
    return finish(opener(rng) + core + maybe_time(rng), rng), None, values


# ---------------------------------------------------------------------------
# value-only moments (no tracked activity)
# ---------------------------------------------------------------------------

VALUE_MOMENTS = {
    "Important accomplishment": [
        "finished my thesis", "got a promotion at work", "finally finished a big project at work",
        "passed my driving test", "won the chess tournament", "graduated from college",
        "achieved my savings goal", "completed the quarterly report ahead of schedule",
        "accomplished everything on my list", "won an award for my research",
        "got accepted into grad school", "paid off my student loans",
    ],
    "Learning": [
        "learned how to play guitar chords", "studied Spanish vocabulary",
        "read a fascinating book about history", "took an online course on statistics",
        "learned something new in class", "practiced a new language",
        "attended a lecture on astronomy", "figured out how to fix the sink by myself",
    ],
    "Be creative": [
        "painted a landscape", "wrote a poem", "drew a sketch of my cat", "knitted a scarf",
        "composed a short song", "designed a logo for a friend", "made a collage",
        "built a birdhouse from scratch", "wrote a short story",
    ],
    "Gratitude": [
        "am grateful for my health", "felt thankful for everyone in my life",
        "appreciated the small things", "feel blessed to have a roof over my head",
        "am thankful for a quiet morning", "felt so grateful for my teachers",
    ],
    "Mindfulness": [
        "enjoyed the beautiful foliage around the park", "meditated for 20 minutes",
        "watched the sunset at the beach", "sat quietly and listened to the birds",
        "noticed the flowers blooming on my street", "took a few deep breaths and felt calm",
        "enjoyed a peaceful cup of tea on the porch", "looked at the stars in the night sky",
    ],
    "Leisure": [
        "watched a movie", "played video games", "binge watched my favorite show",
        "went to the beach", "read a novel in the hammock", "went shopping at the mall",
        "finished watching a great series", "won a board game night",
        "listened to my favorite album", "relaxed on the couch",
    ],
    "Laugh": [
        "laughed so hard at a funny video", "heard a hilarious joke",
        "watched a comedy special", "could not stop giggling at a meme",
        "laughed at my own silly mistake",
    ],
    "Exciting experiences": [
        "went to a concert", "rode a roller coaster", "traveled to Japan",
        "went skydiving for the first time", "booked a trip to Paris",
        "saw a whale on a boat tour", "tried surfing for the first time",
        "went to a music festival",
    ],
    "Compassion for others": [
        "helped an elderly neighbor carry groceries", "volunteered at the food bank",
        "donated to charity", "comforted a crying stranger", "helped a lost kid find his mom",
        "cooked soup for a sick neighbor", "gave directions to a tourist",
    ],
    "Self-compassion": [
        "took a nap", "treated myself to a spa day", "took a long bath and relaxed",
        "forgave myself for a mistake", "slept in without feeling guilty",
        "gave myself a day off",
    ],
}

SOCIAL_MOMENTS = [
    ("went on a date with {p}", ["Romance"]),
    ("{P} surprised me with flowers", ["Romance"]),
    ("celebrated our anniversary", ["Romance"]),
    ("{F} opened up to me about her struggles", ["Emotional Intimacy", "Family"]),
    ("hugged my best friend", ["Emotional Intimacy", "Socializing"]),
    ("my team shipped the new feature together", ["Teamwork", "Important accomplishment"]),
    ("we won the group project competition", ["Teamwork", "Important accomplishment"]),
    ("collaborated with my coworkers on a presentation", ["Teamwork"]),
    ("had a great time playing frisbee with my kids in the park", ["Family", "Leisure"]),
    ("my daughter took her first steps", ["Family"]),
    ("visited my grandparents", ["Family"]),
    ("went to a party with {f}", ["Socializing"]),
    ("hung out with {f}", ["Socializing"]),
    ("played board games with {f}", ["Socializing", "Leisure"]),
    ("my friends threw me a surprise party", ["Socializing", "Exciting experiences"]),
]


def value_moment(rng):
    if rng.random() < 0.3:
        core, values = rng.choice(SOCIAL_MOMENTS)
        core = (core.replace("{p}", rng.choice(PARTNER))
                .replace("{P}", rng.choice(PARTNER).capitalize())
                .replace("{F}", rng.choice(["my sister", "my mom", "my daughter"]).capitalize())
                .replace("{f}", rng.choice(FRIENDS)))
        values = list(values)
        if core[0].isupper() or core.startswith("my ") or core.startswith("we "):
            text = core
        else:
            text = opener(rng) + core
    else:
        value = rng.choice(sorted(VALUE_MOMENTS))
        core = rng.choice(VALUE_MOMENTS[value])
        values = [value]
        text = opener(rng) + core
    return finish(text + maybe_time(rng, 0.4), rng), None, values


# ---------------------------------------------------------------------------
# negative moments (polarity)
# ---------------------------------------------------------------------------

NEG_EVENTS = [
    "{f} broke his leg", "{f} broke her arm", "my dog got sick", "I failed my exam",
    "I got into a fight with {c}", "I lost my wallet on the bus", "my flight got cancelled",
    "I had a terrible headache all day", "my grandmother passed away",
    "I got rejected from the job I wanted", "I missed the deadline at work",
    "I was stuck in traffic for two hours", "my car broke down on the highway",
    "I argued with {p} again", "I felt lonely all weekend", "I spilled coffee on my laptop",
    "I got a parking ticket", "my boss yelled at me in front of everyone",
    "I could not sleep last night", "I am stressed about finals",
    "my phone screen cracked", "it rained and ruined our picnic",
    "I sprained my ankle playing soccer", "I burned dinner and we had to order out",
    "my mom is in the hospital", "{c} forgot my birthday", "I got laid off",
    "our basement flooded", "I was sick with the flu all week", "I bombed my presentation",
    "my cat died", "someone stole my bike", "I had a panic attack on the train",
    "my best friend moved away", "I got food poisoning", "the doctor called with bad news",
    "I missed my bus and was late for my interview", "my landlord raised the rent again",
    "I broke up with {p}", "I cried during lunch break",
]
NEG_CLOSERS = ["", "", "", " and I feel awful", " and it ruined my day", ". I am so upset",
               " which was really frustrating", ". Worst day ever", ". I feel so sad",
               " and I could not stop worrying"]


def negative_moment(rng):
    ev = rng.choice(NEG_EVENTS)
    ev = (ev.replace("{f}", rng.choice(["my best friend", "my brother", "my dad", "my roommate", "my son"]))
          .replace("{c}", rng.choice(FAMILY + FRIENDS))
          .replace("{p}", rng.choice(PARTNER)))
    text = ev + maybe_time(rng, 0.4)
    return finish(text, rng, NEG_CLOSERS)


# ---------------------------------------------------------------------------
# word vectors
# ---------------------------------------------------------------------------

IRREGULAR = {
    "run": ["ran", "running", "runs", "runner"], "swim": ["swam", "swimming", "swims"],
    "ride": ["rode", "riding", "rides"], "eat": ["ate", "eating", "eats", "eaten"],
    "speak": ["spoke", "speaking", "speaks"], "meet": ["met", "meeting", "meets"],
    "catch": ["caught", "catching"], "jog": ["jogged", "jogging", "jogs"],
    "chat": ["chatted", "chatting", "chats"], "watch": ["watched", "watching", "watches"],
    "buy": ["bought", "buying", "buys"], "text": ["texted", "texting", "texts"],
}

GROUPS = {
    "exercise": ["run", "jog", "sprint", "hike", "walk", "yoga", "pilates", "bike", "biking",
                 "cycle", "swim", "gym", "workout", "soccer", "football", "basketball", "tennis",
                 "lift", "weights", "climb", "rowing", "row", "ski", "skiing", "spin", "exercise",
                 "marathon", "trail"],
    "meals": ["breakfast", "lunch", "dinner", "brunch", "supper", "meal", "barbecue", "picnic",
              "feast", "potluck", "cookout"],
    "conversation": ["talk", "chat", "conversation", "call", "phone", "discuss", "gossip", "text",
                     "converse", "speak", "spoke"],
    "media": ["watch", "tv", "movie", "show", "film", "series", "netflix", "video"],
    "food": ["pizza", "pasta", "sushi", "burger", "coffee", "tea", "cake", "cookie", "soup"],
    "shopping": ["buy", "bought", "shop", "shopping", "ticket", "tickets", "mall", "groceries"],
}
DIM = 50


def inflections(base):
    out = {base}
    out.update(IRREGULAR.get(base, []))
    if base.endswith("e"):
        out.update({base + "s", base[:-1] + "ing", base + "d"})
    else:
        out.update({base + "s", base + "ing", base + "ed"})
    return out


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def build_vectors(rng, vocabulary):
    vectors = {}
    for name in sorted(GROUPS):
        centroid = unit([rng.gauss(0, 1) for _ in range(DIM)])
        for base in GROUPS[name]:
            for form in sorted(inflections(base)):
                if form in vectors:
                    continue
                noise = [rng.gauss(0, 1) * 0.45 / math.sqrt(DIM) for _ in range(DIM)]
                vectors[form] = unit([c + e for c, e in zip(centroid, noise)])
    for word in sorted(vocabulary):
        if word not in vectors:
            vectors[word] = unit([rng.gauss(0, 1) for _ in range(DIM)])
    return vectors


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def activity_mix(rng, n, weights):
    out = []
    makers = [
        (lambda: exercise_moment(rng), weights["ex"]),
        (lambda: exercise_moment(rng, expanded=True), weights["ex_exp"]),
        (lambda: exercise_confounder(rng), weights["ex_conf"]),
        (lambda: meal_moment(rng), weights["meal"]),
        (lambda: meal_moment(rng, expanded=True), weights["meal_exp"]),
        (lambda: meal_confounder(rng), weights["meal_conf"]),
        (lambda: conversation_moment(rng), weights["conv"]),
        (lambda: conversation_moment(rng, expanded=True), weights["conv_exp"]),
        (lambda: conversation_confounder(rng), weights["conv_conf"]),
        (lambda: value_moment(rng), weights["value"]),
    ]
    fns = [m for m, _ in makers]
    ws = [w for _, w in makers]
    return [rng.choices(fns, ws)[0]() for _ in range(n)]


CORPUS_WEIGHTS = dict(ex=16, ex_exp=5, ex_conf=4, meal=16, meal_exp=4, meal_conf=3,
                      conv=15, conv_exp=4, conv_conf=3, value=30)
GOLD_WEIGHTS = dict(ex=19, ex_exp=6, ex_conf=5, meal=20, meal_exp=5, meal_conf=3,
                    conv=19, conv_exp=6, conv_conf=3, value=14)


def unique(items, seen):
    out = []
    for item in items:
        if item[0] in seen:
            continue
        seen.add(item[0])
        out.append(item)
    return out


def labels(activity, values, polarity=None):
    out = []
    if activity:
        out.append("activity:" + activity)
    out.extend("value:" + v for v in sorted(set(values)))
    if polarity:
        out.append("polarity:" + polarity)
    return out


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")


def generate(n, rng, weights, seen, budget=50):
    out = []
    while len(out) < n and budget > 0:
        out += unique(activity_mix(rng, n - len(out), weights), seen)
        budget -= 1
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    (out / "corpus").mkdir(parents=True, exist_ok=True)
    (out / "vectors").mkdir(parents=True, exist_ok=True)

    seen = set()
    corpus = generate(2000, random.Random(20190301), CORPUS_WEIGHTS, seen)
    write_jsonl(out / "corpus" / "happy_moments.jsonl", [
        {"id": f"hm-{i:05d}", "text": t, "labels": labels(a, v, "positive")}
        for i, (t, a, v) in enumerate(corpus)])

    activity_gold = generate(400, random.Random(7311), GOLD_WEIGHTS, seen)
    write_jsonl(out / "corpus" / "activity_gold.jsonl", [
        {"id": f"ag-{i:04d}", "text": t, "labels": labels(a, [])}
        for i, (t, a, v) in enumerate(activity_gold)])

    value_gold = generate(200, random.Random(4242), CORPUS_WEIGHTS, seen)
    write_jsonl(out / "corpus" / "values_gold.jsonl", [
        {"id": f"vg-{i:04d}", "text": t, "labels": labels(None, v)}
        for i, (t, a, v) in enumerate(value_gold)])

    rng = random.Random(941156)
    pos_train = generate(941, rng, CORPUS_WEIGHTS, seen)
    write_jsonl(out / "corpus" / "polarity_train_pos.jsonl", [
        {"id": f"pp-{i:04d}", "text": t, "labels": ["polarity:positive"]}
        for i, (t, _, _) in enumerate(pos_train)])
    neg_train = []
    while len(neg_train) < 156:
        t = negative_moment(rng)
        if t not in seen:
            seen.add(t)
            neg_train.append(t)
    write_jsonl(out / "corpus" / "polarity_train_neg.jsonl", [
        {"id": f"pn-{i:04d}", "text": t, "labels": ["polarity:negative"]}
        for i, t in enumerate(neg_train)])

    rng = random.Random(100)
    pos_test = [t for t, _, _ in generate(50, rng, CORPUS_WEIGHTS, seen)]
    neg_test = []
    while len(neg_test) < 50:
        t = negative_moment(rng)
        if t not in seen:
            seen.add(t)
            neg_test.append(t)
    test = [(t, "positive") for t in pos_test] + [(t, "negative") for t in neg_test]
    rng.shuffle(test)
    write_jsonl(out / "corpus" / "polarity_test.jsonl", [
        {"id": f"pt-{i:03d}", "text": t, "labels": ["polarity:" + p]}
        for i, (t, p) in enumerate(test)])

    # Simulated conservative external analyzer for the polarity test set: it
    # only flags overtly worded negatives, leaves most text neutral, and gets a
    # couple of items wrong in both directions.
    overt = re.compile(r"\b(awful|upset|sad|worst|frustrating|terrible|worrying|panic|stressed|lonely)\b", re.I)
    mock = []
    false_negatives = 0
    for t, p in test:
        if p == "negative":
            score = -0.7 if overt.search(t) else rng.choice([0.0, 0.0, 0.3])
        else:
            if false_negatives < 2 and rng.random() < 0.05:
                score = -0.4
                false_negatives += 1
            else:
                score = rng.choice([0.0, 0.0, 0.5])
        mock.append({"text": t, "score": score, "magnitude": abs(score) * 1.5})
    write_jsonl(out / "corpus" / "polarity_external_mock.jsonl", mock)

    vocab = set()
    for path in sorted((out / "corpus").glob("*.jsonl")):
        for line in path.read_text(encoding="utf-8").splitlines():
            for w in re.findall(r"[a-z0-9']+", json.loads(line)["text"].lower()):
                vocab.add(w)
    vectors = build_vectors(random.Random(50), vocab)
    with open(out / "vectors" / "word_vectors.txt", "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {DIM}\n")
        for word in sorted(vectors):
            fh.write(word + " " + " ".join(f"{x:.5f}" for x in vectors[word]) + "\n")


if __name__ == "__main__":
    main()
