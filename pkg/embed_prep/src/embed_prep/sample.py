"""A small labeled English-sentence corpus generator.

Four topics with distinct vocabularies, composed into plain sentences.
Deterministic given the seed; useful for exercising the pipeline
end-to-end where no external corpus is mounted.
"""

from __future__ import annotations

import numpy as np

__all__ = ["TOPICS", "generate_corpus", "topic_terms"]

TOPICS = {
    "sports": {
        "subjects": ["the striker", "our goalkeeper", "the home team",
                     "the visiting squad", "their captain", "the rookie forward",
                     "the defending champion", "the relay team"],
        "verbs": ["scored", "defended", "sprinted past", "outplayed",
                  "trained with", "beat", "drew level with", "rallied against"],
        "objects": ["the midfield", "a late penalty", "the league leaders",
                    "the championship record", "a stubborn defense",
                    "the overtime whistle", "the qualifying heat", "the title race"],
        "tails": ["during the playoff final", "before a roaring stadium",
                  "in the closing minutes", "despite an early injury",
                  "after relentless pressing", "on a muddy pitch"],
    },
    "business": {
        "subjects": ["the startup", "a regional bank", "the retailer",
                     "the board", "our supplier", "the logistics firm",
                     "the insurer", "the exporter"],
        "verbs": ["reported", "forecast", "negotiated", "restructured",
                  "acquired", "audited", "underwrote", "liquidated"],
        "objects": ["quarterly earnings", "a merger agreement", "new inventory",
                    "its debt portfolio", "shareholder dividends",
                    "a supply contract", "the pension fund", "market guidance"],
        "tails": ["amid volatile markets", "after the regulator's review",
                  "to reassure investors", "despite rising interest rates",
                  "before the fiscal deadline", "under new management"],
    },
    "science": {
        "subjects": ["the research team", "an observatory", "the laboratory",
                     "a graduate student", "the survey telescope",
                     "the field biologists", "the chemists", "the geologists"],
        "verbs": ["measured", "synthesized", "observed", "sequenced",
                  "calibrated", "modeled", "catalogued", "replicated"],
        "objects": ["a distant quasar", "the protein structure",
                    "seismic tremors", "an enzyme pathway", "the coral genome",
                    "magnetic anomalies", "a superconducting sample",
                    "the glacier cores"],
        "tails": ["in a peer reviewed study", "with unprecedented precision",
                  "across repeated trials", "using the new spectrometer",
                  "during the antarctic expedition", "under controlled conditions"],
    },
    "film": {
        "subjects": ["the director", "a veteran actress", "the film crew",
                     "the screenwriter", "the studio", "an indie producer",
                     "the cinematographer", "the composer"],
        "verbs": ["premiered", "cast", "edited", "scored", "storyboarded",
                  "restored", "screened", "adapted"],
        "objects": ["the noir thriller", "a coming of age drama",
                    "the documentary footage", "an animated short",
                    "the festival entry", "a silent classic",
                    "the closing scene", "the ensemble comedy"],
        "tails": ["to critical acclaim", "at the autumn festival",
                  "for the streaming release", "after months of reshoots",
                  "before a packed premiere", "with a haunting soundtrack"],
    },
}


def generate_corpus(per_topic: int, seed: int = 0):
    """(labels, sentences): per_topic sentences for each of the 4 topics."""
    rng = np.random.default_rng(seed)
    labels, sentences = [], []
    for topic, bank in sorted(TOPICS.items()):
        for _ in range(per_topic):
            parts = [
                str(rng.choice(bank["subjects"])),
                str(rng.choice(bank["verbs"])),
                str(rng.choice(bank["objects"])),
                str(rng.choice(bank["tails"])),
            ]
            sentence = " ".join(parts).capitalize() + "."
            labels.append(topic)
            sentences.append(sentence)
    return labels, sentences


def topic_terms():
    """Distinctive single-word terms per topic, usable as a vocabulary."""
    terms = {
        "sports": ["striker", "goalkeeper", "playoff", "stadium", "penalty",
                   "championship", "overtime", "midfield"],
        "business": ["merger", "earnings", "dividends", "shareholder",
                     "inventory", "regulator", "audit", "pension"],
        "science": ["quasar", "enzyme", "genome", "spectrometer", "seismic",
                    "superconducting", "glacier", "protein"],
        "film": ["director", "premiere", "screenwriter", "documentary",
                 "cinematographer", "soundtrack", "festival", "thriller"],
    }
    return terms
