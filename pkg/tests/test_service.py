import io

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from kernellp.service import create_app


def png_bytes(array):
    buf = io.BytesIO()
    Image.fromarray(array, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def half_plane_png(size=32):
    img = np.zeros((size, size, 3), dtype=np.uint8)
    img[:, : size // 2] = [220, 40, 40]
    img[:, size // 2 :] = [40, 40, 220]
    return png_bytes(img)


@pytest.fixture
def client():
    return TestClient(create_app())


def upload(client, payload=None, size=32):
    payload = payload or half_plane_png(size)
    resp = client.post("/sessions", files={"image": ("img.png", payload, "image/png")})
    assert resp.status_code == 200
    return resp.json()["session_id"]


def scribble_both_halves(client, sid, size=32):
    q, tq, lo, hi = size // 4, 3 * size // 4, size // 4, 3 * size // 4
    resp = client.post(
        f"/sessions/{sid}/scribbles",
        json={
            "strokes": [
                {"points": [[q, lo], [q, hi]], "label": "fg", "radius": 1},
                {"points": [[tq, lo], [tq, hi]], "label": "bg", "radius": 1},
            ]
        },
    )
    assert resp.status_code == 200
    return resp.json()


class TestSessionLifecycle:
    def test_upload_returns_session(self, client):
        sid = upload(client)
        meta = client.get(f"/sessions/{sid}").json()
        assert meta["width"] == 32 and meta["height"] == 32
        assert meta["version"] == 0 and not meta["has_mask"]

    def test_corrupt_image_400(self, client):
        resp = client.post("/sessions", files={"image": ("x.png", b"not an image", "image/png")})
        assert resp.status_code == 400

    def test_unsupported_format_400(self, client):
        buf = io.BytesIO()
        Image.fromarray(np.zeros((4, 4, 3), dtype=np.uint8), mode="RGB").save(buf, format="BMP")
        resp = client.post("/sessions", files={"image": ("x.bmp", buf.getvalue(), "image/bmp")})
        assert resp.status_code == 400

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope").status_code == 404
        assert client.get("/sessions/nope/mask").status_code == 404
        assert client.post("/sessions/nope/segment").status_code == 404
        assert client.delete("/sessions/nope/scribbles").status_code == 404


class TestScribbles:
    def test_append_bumps_version(self, client):
        sid = upload(client)
        out = scribble_both_halves(client, sid)
        assert out["version"] == 1 and out["stroke_count"] == 2
        out2 = client.post(
            f"/sessions/{sid}/scribbles",
            json={"strokes": [{"points": [[1, 1]], "label": "fg"}]},
        ).json()
        assert out2["version"] == 2 and out2["stroke_count"] == 3

    def test_clear(self, client):
        sid = upload(client)
        scribble_both_halves(client, sid)
        out = client.delete(f"/sessions/{sid}/scribbles").json()
        assert out["stroke_count"] == 0 and out["version"] == 2

    def test_malformed_strokes_400(self, client):
        sid = upload(client)
        assert client.post(f"/sessions/{sid}/scribbles", json={}).status_code == 400
        assert (
            client.post(
                f"/sessions/{sid}/scribbles", json={"strokes": [{"points": [[0]]}]}
            ).status_code
            == 400
        )
        assert (
            client.post(
                f"/sessions/{sid}/scribbles",
                json={"strokes": [{"points": [[500, 0]], "label": "fg"}]},
            ).status_code
            == 400
        )
        assert (
            client.post(
                f"/sessions/{sid}/scribbles",
                json={"strokes": [{"points": [[1, 1]], "label": "maybe"}]},
            ).status_code
            == 400
        )


class TestSegment:
    def test_segment_before_both_classes_409(self, client):
        sid = upload(client)
        assert client.post(f"/sessions/{sid}/segment").status_code == 409
        client.post(
            f"/sessions/{sid}/scribbles",
            json={"strokes": [{"points": [[8, 8], [8, 24]], "label": "fg"}]},
        )
        resp = client.post(f"/sessions/{sid}/segment")
        assert resp.status_code == 409
        assert "background" in resp.json()["detail"]

    def test_segment_and_mask(self, client):
        sid = upload(client)
        scribble_both_halves(client, sid)
        resp = client.post(f"/sessions/{sid}/segment", json={"params": {"budget": 400}})
        assert resp.status_code == 200
        stats = resp.json()["stats"]
        assert stats["n_train"] == 400
        assert stats["fit_ms"] > 0

        mask_resp = client.get(f"/sessions/{sid}/mask")
        assert mask_resp.status_code == 200
        assert mask_resp.headers["content-type"] == "image/png"
        mask = np.asarray(Image.open(io.BytesIO(mask_resp.content)))
        assert mask.shape == (32, 32)
        assert set(np.unique(mask)) <= {0, 255}
        truth = np.zeros((32, 32), dtype=np.uint8)
        truth[:, :16] = 255
        assert (mask == truth).mean() >= 0.99

    def test_rerun_without_changes_identical_mask(self, client):
        sid = upload(client)
        scribble_both_halves(client, sid)
        client.post(f"/sessions/{sid}/segment", json={"params": {"budget": 300}})
        first = client.get(f"/sessions/{sid}/mask").content
        client.post(f"/sessions/{sid}/segment", json={"params": {"budget": 300}})
        second = client.get(f"/sessions/{sid}/mask").content
        assert first == second

    def test_mask_before_segment_404(self, client):
        sid = upload(client)
        assert client.get(f"/sessions/{sid}/mask").status_code == 404

    def test_metadata_after_segment(self, client):
        sid = upload(client)
        scribble_both_halves(client, sid)
        client.post(f"/sessions/{sid}/segment", json={"params": {"budget": 300}})
        meta = client.get(f"/sessions/{sid}").json()
        assert meta["has_mask"]
        assert meta["fg_strokes"] == 1 and meta["bg_strokes"] == 1
        assert meta["stats"]["n_train"] == 300


class TestRetrainOnNewStrokes:
    def test_version_advance_triggers_recompute(self, client):
        sid = upload(client)
        scribble_both_halves(client, sid)
        first = client.post(f"/sessions/{sid}/segment", json={"params": {"budget": 300}}).json()
        assert first["version"] == 1
        client.post(
            f"/sessions/{sid}/scribbles",
            json={"strokes": [{"points": [[2, 2]], "label": "fg"}]},
        )
        second = client.post(f"/sessions/{sid}/segment", json={"params": {"budget": 300}}).json()
        assert second["version"] == 2
        assert second["stats"]["fit_ms"] > 0
