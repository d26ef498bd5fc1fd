#!/usr/bin/env python3
"""Generate the bundled synthetic stand-in corpora under data/corpora/.

Each corpus is JSONL with exactly the keys ``text`` and ``label``
(0 = deceptive, 1 = truthful). Texts are assembled from per-genre sentence
banks with a fixed seed, so the output is reproducible byte for byte:

    python3 tools/gen_synthetic_corpora.py data/corpora
"""

import json
import random
import sys
from pathlib import Path

SEED = 20221

FILL = {
    "celeb": ["the senator", "a famous actor", "the mayor", "a billionaire",
              "the governor", "a pop star", "the minister"],
    "group": ["foreign agents", "big pharma", "the elites", "secret societies",
              "the bankers", "shadow groups"],
    "topic": ["vaccine", "election", "climate", "housing", "energy",
              "employment", "immigration", "healthcare"],
    "thing": ["the water", "our phones", "the weather", "the money",
              "the ballots", "your food"],
    "verbing": ["plotting", "laughing", "dancing", "hiding", "lying", "cheating"],
    "agency": ["statistics bureau", "health department", "treasury",
               "census office", "labor ministry"],
    "day": ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"],
    "money": ["5000", "10,000", "250,000", "90,000"],
    "num": [str(n) for n in range(2, 41)],
}

BANKS = {
    "dis": {
        0: [
            "SHOCKING: {celeb} caught {verbing} with {group}!!!",
            "They don't want you to know the truth about the {topic} scandal!",
            "Share this before it gets deleted!!",
            "Totally insane {topic} cover-up exposed... wake up, people!",
            "The {group} are secretly poisoning {thing}.",
            "This is huge, really huge!",
            "Everyone is talking about it, but the media stays silent!",
            "Unbelievable video proves the {topic} story was fake!!!",
            "Big news: {celeb} is quietly hiding {thing}.",
            "Why is nobody reporting this?!",
            "Wow, just wow, they lied again!",
        ],
        1: [
            "According to the {agency} report, {topic} rates increased by {num} percent during the last quarter.",
            "I spoke with officials who said the analysis would be published on {day}.",
            "The committee reviewed the evidence and concluded that further investigation was necessary.",
            "Researchers believe the results indicate a significant change in {topic} policy.",
            "Officials explained that the budget estimate reflects regional population statistics.",
            "The government announced a comprehensive infrastructure program, which includes transportation improvements.",
            "Economists think the decision should stabilize consumer prices, although uncertainty remains.",
            "I understand that the representatives will consider the proposal next week.",
            "Data from the {agency} shows an average decrease of {num} percent compared with previous years.",
            "The spokesperson declined to comment on the ongoing {topic} investigation.",
        ],
    },
    "en": {
        0: [
            "Please keep this between us, the numbers will look great soon.",
            "Move the losses to the other entity before the quarter closes.",
            "Don't worry about the auditors, everything is handled.",
            "We just need to book the revenue now and fix it later.",
            "Tell the analysts our position is very strong!",
            "Nobody needs to see these trades, okay?",
            "Just sign it quickly, the deal is basically done.",
            "Delete the old spreadsheet after you read this.",
        ],
        1: [
            "I think we should schedule a meeting to review the transmission contract on {day}.",
            "Attached is the revised schedule for the {topic} pipeline project.",
            "I reviewed the capacity analysis and the figures appear consistent with the regulatory filing.",
            "Please let me know whether the counterparty has confirmed the delivery volumes.",
            "We must coordinate with the legal department regarding the interconnection agreement.",
            "I understand the commission will consider the tariff proposal during the hearing.",
            "The report indicates that average demand increased by {num} percent this quarter.",
            "I realized the invoice totals differ slightly from the contract amounts.",
        ],
    },
    "fb": {
        0: [
            "Congratulations!!! You have won {money} dollars in our lucky draw!",
            "Click the link now and claim your free prize!!",
            "Send your bank details today to receive the money.",
            "Hurry, this amazing offer ends tonight!",
            "Dear friend, I need your urgent help to transfer {money} dollars.",
            "Very easy money, just pay a small fee first!",
            "Guaranteed results, totally safe and secret!!!",
            "Act fast, only three winners left!",
        ],
        1: [
            "I had a wonderful time at the park with my family yesterday.",
            "I think the new restaurant downtown deserves another visit.",
            "My sister graduated from university and I feel incredibly proud.",
            "We watched the football match together and celebrated afterwards.",
            "I realized that volunteering at the community center changed my perspective.",
            "Looking forward to the weekend hiking trip with friends.",
            "I understand why everyone recommended this bookstore, the collection is impressive.",
            "Our neighborhood organized a cleanup on {day} and many families participated.",
        ],
    },
    "pos": {
        0: [
            "This hotel was amazing, absolutely perfect in every way!",
            "Best stay ever!!! We will definitely come back!",
            "The staff were so nice and the room was so clean!",
            "Luxury at its finest, highly recommended!",
            "Everything was great, great, great!",
            "My husband and I loved it so much!",
            "Wonderful, beautiful, fantastic hotel!!",
            "You will not regret it, trust me!",
        ],
        1: [
            "The room on the fourteenth floor had a comfortable bed and a quiet atmosphere.",
            "I think the location near the river walk is convenient for exploring downtown restaurants.",
            "Breakfast was included, although the selection was somewhat limited on weekends.",
            "The concierge recommended a museum, which I found genuinely interesting.",
            "Parking cost {num} dollars per night, which seemed reasonable considering the neighborhood.",
            "I understood the renovation schedule because the manager explained it carefully.",
            "The fitness center was small but adequately equipped for a business traveler.",
            "Checkout was efficient, and the receptionist provided a detailed receipt.",
        ],
    },
    "neg": {
        0: [
            "Worst hotel ever, absolutely terrible!!!",
            "The room was so dirty and the staff were so rude!",
            "Never stay here, total disaster!",
            "Horrible experience, my husband and I left early!",
            "Awful, awful, awful service!!",
            "Do not waste your money on this place!",
            "Disgusting, just disgusting!",
            "They ruined our whole vacation, avoid it!",
        ],
        1: [
            "The air conditioning in our room failed twice, and maintenance arrived after {num} minutes.",
            "I think the front desk was understaffed, because check-in required a considerable wait.",
            "The bathroom ventilation was inadequate, although housekeeping responded promptly.",
            "Street noise from the construction project made sleeping difficult on weekdays.",
            "I noticed that the advertised breakfast hours differed from the actual schedule.",
            "Parking charges of {num} dollars were not mentioned during the reservation.",
            "The elevator was out of service on {day}, which was inconvenient with luggage.",
            "I understand renovations happen, but the management should have informed guests.",
        ],
    },
}

NEUTRAL = [
    "It happened on {day}.",
    "See the details below.",
    "More information will follow.",
    "This was posted yesterday.",
]

# name, bank, document count, probability a sentence comes from the other label
CORPORA = [
    ("syn_dis", "dis", 220, 0.22),
    ("syn_en", "en", 200, 0.18),
    ("syn_fb", "fb", 200, 0.18),
    ("syn_pos", "pos", 200, 0.18),
    ("syn_neg", "neg", 200, 0.18),
]


def fill(rng, template):
    out = template
    for key, values in FILL.items():
        token = "{" + key + "}"
        while token in out:
            out = out.replace(token, rng.choice(values), 1)
    return out


def make_document(rng, bank, label, noise):
    sentences = []
    for _ in range(rng.randint(2, 6)):
        r = rng.random()
        if r < 0.12:
            template = rng.choice(NEUTRAL)
        elif r < 0.12 + noise:
            template = rng.choice(bank[1 - label])
        else:
            template = rng.choice(bank[label])
        sentences.append(fill(rng, template))
    return " ".join(sentences)


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data/corpora")
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    for name, bank_name, count, noise in CORPORA:
        bank = BANKS[bank_name]
        labels = [i % 2 for i in range(count)]
        rng.shuffle(labels)
        with open(out_dir / f"{name}.jsonl", "w", encoding="utf-8") as fh:
            for label in labels:
                text = make_document(rng, bank, label, noise)
                fh.write(json.dumps({"text": text, "label": label}) + "\n")


if __name__ == "__main__":
    main()
