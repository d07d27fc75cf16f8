#!/usr/bin/env python3
# Copyright 2026 The stylepipe Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the demo corpora, synonym table and rulebook.

Two styles share one content vocabulary and differ only in marker words.
Each marker has a plain counterpart; the plain sets of the two styles are
disjoint so one symmetric synonym table serves both. A third, plain-register
corpus supplies out-of-domain negatives for the style classifier.
"""
import random

FORMAL = {
    "shall": "will", "commence": "start", "terminate": "end", "purchase": "buy",
    "assist": "help", "require": "need", "obtain": "get", "inform": "tell",
    "residence": "home", "vehicle": "car", "employment": "job",
    "subsequently": "later", "approximately": "about", "sufficient": "enough",
    "numerous": "many", "endeavor": "try", "utilize": "use", "request": "ask",
    "demonstrate": "show",
}
CASUAL = {
    "gonna": "going", "grab": "take", "folks": "people", "buddy": "friend",
    "stuff": "things", "kinda": "somewhat", "awesome": "great", "chill": "relax",
    "bucks": "dollars", "yeah": "yes", "gotta": "must", "wanna": "want",
    "nope": "no", "cool": "fine", "hang": "stay", "super": "very",
}

TEAMS = ["committee", "board", "tenant", "council", "agency", "auditor", "team",
         "department", "contractor", "landlord", "applicant", "manager", "clinic",
         "school", "bank"]
THINGS = ["report", "inspection", "survey", "audit", "renovation", "review",
          "project", "payment", "contract", "meeting", "lease", "schedule",
          "budget", "training", "upgrade", "hearing"]
TIMES = ["Monday", "Friday", "the weekend", "next month", "the deadline",
         "the holidays", "noon", "the summer", "March", "the evening"]

FORMAL_T = [
    "The {team} shall commence the {thing} before {time}.",
    "The {team} shall terminate the {thing} after {time}.",
    "Residents shall obtain approximately {n} copies of the {thing} by {time}.",
    "The {team} shall require sufficient funds to purchase a vehicle for the {thing}.",
    "We shall inform the {team} regarding the {thing} before {time}.",
    "The {team} shall assist numerous applicants with the {thing} on {time}.",
    "Subsequently, the {team} shall utilize the {thing} to demonstrate compliance.",
    "Please request the {thing} from the {team} prior to {time}.",
    "The {team} shall endeavor to complete the {thing} at the residence by {time}.",
    "Employment records shall accompany the {thing} submitted to the {team}.",
    "The {team} shall purchase approximately {n} items for the {thing}.",
    "Numerous residents shall require assistance regarding the {thing}.",
]
CASUAL_T = [
    "Yeah, the {team} is gonna wrap the {thing} before {time}.",
    "The {team} gotta grab the {thing} stuff by {time}.",
    "Folks, the {thing} was kinda awesome this {time}.",
    "My buddy wanna hang at the {thing} after {time}.",
    "Nope, the {team} is super chill over the {thing}.",
    "The {thing} cost like {n} bucks, yeah.",
    "We gotta chill with the {team} after the {thing} on {time}.",
    "Folks are gonna grab stuff for the {thing} at {time}.",
    "The {team} is kinda cool with the {thing} stuff.",
    "My buddy said the {thing} was super awesome, yeah.",
    "Nope, we wanna hang out before the {thing} on {time}.",
    "The {team} gonna grab {n} bucks for the {thing}.",
]
# Plain register: the out-of-domain negatives for the style classifier.
GENERAL_T = [
    "People said the {thing} will start on {time}.",
    "Many people want to know about the {thing}.",
    "The {team} will need more time for the {thing}.",
    "Ask the {team} to show the {thing} to people.",
    "It is fine to stay home until {time}.",
    "They will take the car to the {thing} later.",
    "The {thing} was very good and people liked it.",
    "We must tell the {team} about the {thing} by {time}.",
    "My friend will try to get {n} dollars for the {thing}.",
    "Yes, the {team} can use the {thing} after {time}.",
    "No one wants to end the {thing} before {time}.",
    "It was somewhat hard to relax during the {thing}.",
    "The job at the {team} will help many people.",
    "Things were great at the {thing} on {time}.",
    "The {team} has enough money to buy the {thing}.",
]


def generate(rng, templates, count):
    seen, out = set(), []
    while len(out) < count:
        t = rng.choice(templates)
        s = t.format(team=rng.choice(TEAMS), thing=rng.choice(THINGS),
                     time=rng.choice(TIMES), n=rng.randint(2, 90))
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def main():
    rng = random.Random(2026)
    with open("formal.txt", "w") as f:
        f.write("\n".join(generate(rng, FORMAL_T, 250)) + "\n")
    with open("casual.txt", "w") as f:
        f.write("\n".join(generate(rng, CASUAL_T, 250)) + "\n")
    with open("general.txt", "w") as f:
        f.write("\n".join(generate(rng, GENERAL_T, 150)) + "\n")
    pairs = list(FORMAL.items()) + list(CASUAL.items())
    plain = [p for _, p in pairs]
    assert len(set(plain)) == len(plain), "plain counterparts must be unique"
    words = {w.strip(",.").lower() for t in FORMAL_T + CASUAL_T for w in t.split()}
    assert not words & set(plain), "templates must not contain plain counterparts"
    with open("synonyms.tsv", "w") as f:
        f.write("# marker\tplain; applied symmetrically by the forward mock MT\n")
        for m, p in pairs:
            f.write(f"{m}\t{p}\n")
    with open("rulebook.tsv", "w") as f:
        f.write("# plain\tmarker; the mock generator restores markers\n")
        for m, p in pairs:
            f.write(f"{p}\t{m}\n")
            f.write(f"{p.capitalize()}\t{m.capitalize()}\n")


if __name__ == "__main__":
    main()
