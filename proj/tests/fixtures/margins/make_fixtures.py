#!/usr/bin/env python3
"""Synthesizes probe bundles and replay vectors for the margin fixtures.

The vectors are constructed, not recorded: each provider/language cell gets
six bundles whose per-bundle cosines are placed so the mean margins land on
the published base-condition values. They exercise the margin arithmetic,
not any embedding model.

Also writes vectors for the hard-name-mask variants (mask seed 0), where the
masked C1/C2a/C2b texts coincide.

    python3 make_fixtures.py [outdir]
"""

import hashlib
import json
import math
import random
import sys
from pathlib import Path

DIM = 48

TARGETS = {
    ("EN", "openai-3-large"): (0.175, 0.305, 0.486),
    ("EN", "voyage-3.5"): (0.160, 0.298, 0.464),
    ("FR", "openai-3-large"): (0.139, 0.260, 0.407),
    ("FR", "voyage-3.5"): (0.164, 0.277, 0.447),
}

# Zero-sum jitter so per-bundle margins vary but the means are exact.
JITTER = [0.020, -0.020, 0.011, -0.011, 0.004, -0.004]

PEOPLE = {
    "EN": [
        ("Margaret Holloway", "Dennis Archer", "Paul Whitfield", "Susan Okafor", "coastal erosion modelling", "medieval trade routes"),
        ("James O'Connell", "Janet Rowe", "Harold Pike", "Linda Marsh", "sparse matrix factorization", "urban bee populations"),
        ("Aisha Rahman", "Asha Raman", "Peter Quill", "Nora Blake", "glacier mass balance", "opera stage lighting"),
        ("Thomas Berger", "Tomas Burger", "Helen Fisk", "Omar Haddad", "protein folding kinetics", "railway signalling history"),
        ("Chloé Martin-Lewis", "Chloe Martins", "Victor Lane", "Irene Cole", "soil carbon sequestration", "jazz improvisation theory"),
        ("Robert Nakamura", "Roberta Nakata", "Edwin Hale", "Grace Lin", "wind turbine wake effects", "Byzantine coinage"),
    ],
    "FR": [
        ("Élodie Marchand", "Élise Marchal", "Bruno Lefèvre", "Camille Roux", "érosion des littoraux", "routes commerciales médiévales"),
        ("François Dupré", "Françoise Duprat", "Gérard Noël", "Hélène Vidal", "factorisation de matrices creuses", "abeilles en milieu urbain"),
        ("Anaïs Lefèbvre", "Annie Lebfèvre", "Jérôme Caron", "Léa Moreau", "bilan de masse des glaciers", "éclairage scénique à l'opéra"),
        ("Jean-Pierre Garnier", "Jean-Paul Garnet", "Sébastien Roy", "Inès Benali", "cinétique du repliement des protéines", "histoire de la signalisation ferroviaire"),
        ("Thérèse Bouchard", "Thérésa Boucher", "Marc Aubert", "Zoé Perrin", "séquestration du carbone des sols", "théorie de l'improvisation jazz"),
        ("Benoît Lacroix", "Benoîte Lacroux", "Yves Tanguy", "Maëlle Petit", "effets de sillage des éoliennes", "monnaies byzantines"),
    ],
}


def query_text(lang, author, topic):
    if lang == "EN":
        return f"Which works by {author} on {topic}?"
    return f"Quels travaux de {author} portent sur {topic} ?"


def candidate_text(lang, author, topic):
    if lang == "EN":
        return f"Research paper: '{topic}'. Author: {author}."
    return f"Article de recherche : « {topic} ». Auteur : {author}."


def mask_token(lang, seed=0):
    return ("AUTHOR_" if lang == "EN" else "AUTEUR_") + f"{seed % 1000:03d}"


def text_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def orthogonal_to(axis, rng):
    """Random unit vector orthogonal to basis vector `axis`."""
    v = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
    v[axis] = 0.0
    return unit(v)


def at_cosine(axis, c, rng):
    """Unit vector whose cosine with basis vector `axis` is exactly c."""
    u = orthogonal_to(axis, rng)
    s = math.sqrt(1.0 - c * c)
    v = [s * x for x in u]
    v[axis] = c
    return v


def bundles():
    out = []
    for lang, rows in PEOPLE.items():
        for i, (author, imp_a, imp_b, other, topic, other_topic) in enumerate(rows):
            q = {"text": query_text(lang, author, topic), "author": author, "topic": topic}
            cand = lambda a, t: {"text": candidate_text(lang, a, t), "author": a, "topic": t}
            out.append({
                "query_id": f"{lang.lower()}-{i + 1:02d}",
                "language": lang,
                "query": q,
                "candidates": {
                    "C1": cand(author, topic),
                    "C2a": cand(imp_a, topic),
                    "C2b": cand(imp_b, topic),
                    "C3": cand(author, other_topic),
                    "C4": cand(other, other_topic),
                },
            })
    return out


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    bs = bundles()
    vectors = []
    seen = set()

    def emit(provider, text, values):
        key = (provider, text_hash(text))
        if key in seen:
            return
        seen.add(key)
        vectors.append({"text_hash": key[1], "provider": provider, "dim": DIM, "values": values})

    for (lang, provider), (dn, dt, db) in TARGETS.items():
        rng = random.Random(f"{lang}/{provider}")
        cell = [b for b in bs if b["language"] == lang]
        for j, b in enumerate(cell):
            e = JITTER[j]
            s1 = 0.80 + 0.5 * e
            c = b["candidates"]
            emit(provider, b["query"]["text"], [1.0 if k == 0 else 0.0 for k in range(DIM)])
            emit(provider, c["C1"]["text"], at_cosine(0, s1, rng))
            emit(provider, c["C2a"]["text"], at_cosine(0, s1 - (dn + e), rng))
            emit(provider, c["C2b"]["text"], at_cosine(0, s1 - (dn + e) - 0.035, rng))
            emit(provider, c["C3"]["text"], at_cosine(0, s1 - (dt - e), rng))
            emit(provider, c["C4"]["text"], at_cosine(0, s1 - (db + 0.5 * e), rng))

            # Hard-masked variant: query on axis 1; C1/C2a/C2b collapse to one text.
            mask = mask_token(lang)
            topic, other_topic = b["query"]["topic"], c["C3"]["topic"]
            emit(provider, query_text(lang, mask, topic), [1.0 if k == 1 else 0.0 for k in range(DIM)])
            emit(provider, candidate_text(lang, mask, topic), at_cosine(1, 0.62, rng))
            emit(provider, candidate_text(lang, mask, other_topic), at_cosine(1, 0.41, rng))

    with open(outdir / "bundles.jsonl", "w", encoding="utf-8") as f:
        for b in bs:
            f.write(json.dumps(b, ensure_ascii=False) + "\n")
    with open(outdir / "vectors.jsonl", "w", encoding="utf-8") as f:
        for v in vectors:
            f.write(json.dumps(v) + "\n")


if __name__ == "__main__":
    main()
