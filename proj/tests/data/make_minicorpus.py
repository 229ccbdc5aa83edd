#!/usr/bin/env python3
"""Generates the synthetic mini-corpus used by the golden end-to-end tests.

Output (next to this script):
  minicorpus_predictions.jsonl  one record per model x sentence
  minicorpus_emotions.jsonl     one emotion record per sentence and per utterance

The corpus is fixed once committed; rerunning with the same seed reproduces it.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
SEED = 1925

WORDS = (
    "we went to the station and waited for hours in the cold there was no "
    "bread my mother held my hand tightly soldiers came through the village "
    "every morning after that I never saw my father again our neighbors hid "
    "us in a barn for three weeks it was quiet and dark we were afraid but "
    "also hopeful the war ended in spring we walked home through the forest "
    "people were kind sometimes and cruel other times I remember the music "
    "from the wedding my sister laughed at the table life was beautiful"
).split()

EMOTIONS = ["joy", "sadness", "anger", "fear", "love", "surprise"]

DOCS = {"int-001": 9, "int-002": 8, "int-003": 7, "int-004": 9, "int-005": 7}


def sentence(rng):
    n = rng.choice([2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 16, 20, 24])
    words = [rng.choice(WORDS) for _ in range(n)]
    words[0] = words[0].capitalize()
    return " ".join(words) + rng.choice([".", ".", ".", "!", "?"])


def conf(rng, lo=0.34, hi=0.999):
    return round(rng.uniform(lo, hi), 3)


def polar(rng, p_neg=0.5):
    return "negative" if rng.random() < p_neg else "positive"


def main():
    rng = random.Random(SEED)
    preds = []
    emotions = []
    for doc, n_utt in DOCS.items():
        for u in range(n_utt):
            n_sent = rng.choice([1, 2, 3, 4, 4, 5, 6])
            for s in range(n_sent):
                text = sentence(rng)
                kind = rng.random()
                if kind < 0.08:
                    # exact three-way confidence tie -> fallback
                    c = conf(rng)
                    labels = {"siebert": ("negative", c), "cardiffnlp": ("neutral", c), "nlptown": ("5", c)}
                elif kind < 0.16:
                    # three-way split, distinct confidences
                    labels = {
                        "siebert": ("positive", conf(rng)),
                        "cardiffnlp": ("neutral", conf(rng)),
                        "nlptown": (rng.choice(["1", "2"]), conf(rng)),
                    }
                elif kind < 0.36:
                    lab = polar(rng)
                    stars = rng.choice(["1", "2"]) if lab == "negative" else rng.choice(["4", "5"])
                    labels = {"siebert": (lab, conf(rng)), "cardiffnlp": (lab, conf(rng)), "nlptown": (stars, conf(rng))}
                else:
                    car = rng.choices(["negative", "neutral", "positive"], [0.2, 0.65, 0.15])[0]
                    labels = {
                        "siebert": (polar(rng, 0.54), conf(rng)),
                        "cardiffnlp": (car, conf(rng)),
                        "nlptown": (rng.choice(["1", "2", "3", "4", "5"]), conf(rng)),
                    }
                for model in ("siebert", "cardiffnlp", "nlptown"):
                    label, c = labels[model]
                    if model == "siebert" and rng.random() < 0.1:
                        label = label.upper()  # casing noise, matched case-insensitively
                    preds.append({"doc_id": doc, "utt_idx": u, "sent_idx": s, "model": model,
                                  "label": label, "confidence": c, "text": text})
                emotions.append({"doc_id": doc, "utt_idx": u, "sent_idx": s,
                                 "emotion": rng.choice(EMOTIONS), "confidence": conf(rng, 0.4, 0.99)})
            emotions.append({"doc_id": doc, "utt_idx": u,
                             "emotion": rng.choice(EMOTIONS), "confidence": conf(rng, 0.4, 0.99)})

    # shuffle so ingest order-insensitivity is exercised by the goldens
    rng.shuffle(preds)
    with open(HERE / "minicorpus_predictions.jsonl", "w") as f:
        for p in preds:
            f.write(json.dumps(p) + "\n")
    with open(HERE / "minicorpus_emotions.jsonl", "w") as f:
        for e in emotions:
            f.write(json.dumps(e) + "\n")
    n_sent = len(preds) // 3
    print(f"{sum(DOCS.values())} utterances, {n_sent} sentences, {len(preds)} prediction records")


if __name__ == "__main__":
    main()
