"""Record a scripted explorer session against the real service.

The captured request/response exchange drives the frontend tests, so the
overlays they assert against are exactly what the service returns.
Run from the repository root:

    python3 frontend/scripts/gen_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from axialgen.service import create_app

GRID_OUTER = [(0, 0), (100, 0), (100, 100), (0, 100)]
GRID_BLOCKS = [
    [(bx, by), (bx + 20, by), (bx + 20, by + 20), (bx, by + 20)]
    for bx in (10, 40, 70)
    for by in (10, 40, 70)
]


def polygon_payload():
    rings = [[list(map(float, p)) for p in GRID_OUTER] + [list(map(float, GRID_OUTER[0]))]]
    for h in GRID_BLOCKS:
        rings.append([list(map(float, p)) for p in h] + [list(map(float, h[0]))])
    return {"type": "Polygon", "coordinates": rings}


def main() -> None:
    client = TestClient(create_app())
    exchanges = []

    def record(method, path, body=None):
        if method == "GET":
            resp = client.get(path)
        else:
            resp = client.post(path, json=body)
        entry = {
            "method": method,
            "path": path,
            "body": body,
            "status": resp.status_code,
            "response": resp.json() if resp.status_code != 204 else None,
        }
        exchanges.append(entry)
        return entry

    created = record("POST", "/sessions", {"map": polygon_payload(), "cell_size": "auto"})
    sid = created["response"]["id"]
    record("GET", f"/sessions/{sid}/medial")
    record("POST", f"/sessions/{sid}/isovist", {"point": [5.0, 50.0]})
    record("POST", f"/sessions/{sid}/isovist", {"point": [20.0, 20.0]})  # on a block: 422
    record("POST", f"/sessions/{sid}/bucket", {"segment": [[31.0, 35.0], [39.0, 35.0]]})
    for step in range(4):
        record(
            "POST",
            f"/sessions/{sid}/reduce/step",
            {"strategy": "global", "overlap_threshold": 0.85, "step": step},
        )
    record(
        "POST",
        f"/sessions/{sid}/reduce/step",
        {"strategy": "bfs", "overlap_threshold": 0.85, "step": 4},
    )  # strategy switch mid-run: 409, state unchanged
    for step in range(4, 9):  # remaining selections, then 204
        record(
            "POST",
            f"/sessions/{sid}/reduce/step",
            {"strategy": "global", "overlap_threshold": 0.85, "step": step},
        )
    record("GET", f"/sessions/{sid}/axial")

    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "grid_session.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(exchanges, indent=1))
    print(f"wrote {out} ({len(exchanges)} exchanges)")


if __name__ == "__main__":
    main()
