"""Regenerate src/multicorr/data/family_expansions.json from the constructors.

Run only after a deliberate change to a family transcription, then update
the pinned hash in tests/test_families.py.
"""
import hashlib
import json
from pathlib import Path

from multicorr.families import REPRESENTATIVES, StateFamily, make_family

OUT = Path(__file__).resolve().parents[1] / "src" / "multicorr" / "data" / "family_expansions.json"


def main():
    doc = {}
    for name, params, target in REPRESENTATIVES:
        state = make_family(StateFamily(name, params))
        terms = {
            format(i, "04b"): [round(float(z.real), 15), round(float(z.imag), 15)]
            for i, z in enumerate(state.amplitudes)
            if abs(z) > 1e-15
        }
        doc[name] = {"params": list(params), "measured_qubit": "ABCD"[target], "normalized_terms": terms}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    OUT.write_text(text)
    print(hashlib.sha256(text.encode()).hexdigest())


if __name__ == "__main__":
    main()
