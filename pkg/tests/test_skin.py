import numpy as np
import pytest

from gesturepilot.errors import ContractError, FormatError
from gesturepilot.geometry import BoundingBox
from gesturepilot.scene import Palette, SceneSpec, facing_user_state, render
from gesturepilot.skin import (
    SkinMask,
    SkinModel,
    detect_skin,
    erase_body_regions,
    load_skin_model,
    quantize,
    save_skin_model,
    search_region,
    skin_probability,
    train_skin_model,
)


def test_train_separates_classes_and_smooths_unseen():
    skin = np.tile([200, 120, 100], (500, 1)).astype(np.uint8)
    nonskin = np.tile([0, 0, 255], (500, 1)).astype(np.uint8)
    model = train_skin_model(skin, nonskin, bins=4)
    q_skin = tuple(quantize(np.array([200, 120, 100], np.uint8), 4))
    q_non = tuple(quantize(np.array([0, 0, 255], np.uint8), 4))
    assert model.table[q_skin] == pytest.approx(501 / 502)
    assert model.table[q_non] == pytest.approx(1 / 502)
    untouched = np.ones((4, 4, 4), dtype=bool)
    untouched[q_skin] = untouched[q_non] = False
    assert np.all(model.table[untouched] == 0.5)


def test_train_single_conflicting_pixel():
    px = np.array([[100, 100, 100]], dtype=np.uint8)
    model = train_skin_model(px, px, bins=8)
    assert skin_probability(model, px[0]) == 0.5


def test_train_matches_counting_oracle(rng):
    pixels = rng.integers(0, 256, size=(1000, 3)).astype(np.uint8)
    labels = rng.random(1000) < 0.4
    bins = 8
    model = train_skin_model(pixels[labels], pixels[~labels], bins=bins)
    skin_counts = np.zeros((bins,) * 3)
    non_counts = np.zeros((bins,) * 3)
    for px, is_skin in zip(pixels, labels):
        cell = tuple(int(c) * bins // 256 for c in px)
        if is_skin:
            skin_counts[cell] += 1
        else:
            non_counts[cell] += 1
    want = (skin_counts + 1) / (skin_counts + non_counts + 2)
    assert np.allclose(model.table, want)


def test_train_rejects_empty_sets():
    px = np.array([[1, 2, 3]], dtype=np.uint8)
    empty = np.zeros((0, 3), dtype=np.uint8)
    with pytest.raises(ContractError):
        train_skin_model(empty, px)
    with pytest.raises(ContractError):
        train_skin_model(px, empty)


def test_lookup_is_pure_table_indexing(rng):
    model = SkinModel(16, rng.random((16, 16, 16)))
    for _ in range(50):
        p = rng.integers(0, 256, size=3).astype(np.uint8)
        cell = tuple(int(c) * 16 // 256 for c in p)
        assert skin_probability(model, p) == model.table[cell]


def test_lookup_constant_within_cell(rng):
    model = SkinModel(64, rng.random((64, 64, 64)))
    a = np.array([100, 101, 102], dtype=np.uint8)
    b = np.array([103, 100, 103], dtype=np.uint8)  # same 4-wide cells
    assert skin_probability(model, a) == skin_probability(model, b)


def test_lookup_channel_255_in_range(rng):
    model = SkinModel(64, rng.random((64, 64, 64)))
    p = np.array([255, 255, 255], dtype=np.uint8)
    assert skin_probability(model, p) == model.table[63, 63, 63]


def test_lookup_rejects_non_rgb():
    model = SkinModel(4, np.full((4, 4, 4), 0.5))
    with pytest.raises(ContractError):
        skin_probability(model, np.zeros((5, 5), dtype=np.uint8))


# -- search region and detection ----------------------------------------------

def test_search_region_arithmetic():
    region = search_region(BoundingBox(100, 100, 50, 80), 640, 480)
    assert region == BoundingBox(50, 60, 150, 120)


def test_search_region_clipped_at_edge():
    region = search_region(BoundingBox(5, 5, 50, 80), 640, 480)
    assert region.x == 0 and region.y == 0
    assert region.right == 105 and region.bottom == 85


def test_detect_no_skin_colors_all_zero(skin_model):
    clothing = Palette().clothing
    frame = np.tile(np.array(clothing, np.uint8), (120, 160, 1))
    mask = detect_skin(skin_model, frame, BoundingBox(40, 20, 40, 80))
    assert mask.count() == 0


def test_detect_mask_dims_match_clipped_region(skin_model):
    frame = np.zeros((120, 160, 3), dtype=np.uint8)
    mask = detect_skin(skin_model, frame, BoundingBox(0, 0, 40, 80))
    assert mask.region == BoundingBox(0, 0, 80, 80)
    assert mask.bits.shape == (80, 80)


def test_detect_threshold_contract(skin_model):
    frame = np.zeros((60, 60, 3), dtype=np.uint8)
    with pytest.raises(ContractError):
        detect_skin(skin_model, frame, BoundingBox(10, 10, 20, 20), threshold=1.0)


def rendered_scene(arm="left", angle=0.9):
    spec = SceneSpec(user_position=(0.0, 3.0, 0.0), arm_which=arm,
                     arm_angle=angle)
    frame, truth = render(spec, facing_user_state(spec.user_position))
    return frame.pixels, truth


def test_detect_covers_rendered_skin(skin_model):
    pixels, truth = rendered_scene()
    pal = Palette()
    mask = detect_skin(skin_model, pixels, truth.body_box)
    r = mask.region
    patch = pixels[r.y:r.bottom, r.x:r.right]
    is_skin = np.all(patch == pal.skin, axis=-1)
    is_torso = np.all(patch == pal.clothing, axis=-1)
    assert is_skin.sum() > 0 and is_torso.sum() > 0
    assert mask.bits[is_skin].mean() >= 0.90
    assert mask.bits[is_torso].mean() <= 0.02


def test_detect_deterministic(skin_model):
    pixels, truth = rendered_scene(arm="right", angle=0.3)
    a = detect_skin(skin_model, pixels, truth.body_box)
    b = detect_skin(skin_model, pixels, truth.body_box)
    assert a.region == b.region
    assert np.array_equal(a.bits, b.bits)


def test_detect_threshold_monotone(skin_model):
    pixels, truth = rendered_scene(arm="front_high")
    loose = detect_skin(skin_model, pixels, truth.body_box, threshold=0.3)
    strict = detect_skin(skin_model, pixels, truth.body_box, threshold=0.7)
    assert not np.any(strict.bits & ~loose.bits)


# -- body-band erasure ----------------------------------------------------------

def test_erase_keeps_only_middle_band():
    box = BoundingBox(10, 20, 30, 40)
    mask = SkinMask(box, np.ones((40, 30), dtype=bool))
    out = erase_body_regions(mask, box)
    rows = np.arange(40)
    kept = (rows >= 10) & (rows < 22)  # 0.25*40 .. 0.55*40
    assert np.array_equal(out.bits.any(axis=1), kept)
    assert np.all(out.bits[kept])


def test_erase_leaves_outside_untouched():
    region = BoundingBox(0, 0, 100, 100)
    bits = np.zeros((100, 100), dtype=bool)
    bits[5, 5] = bits[90, 95] = True
    mask = SkinMask(region, bits)
    out = erase_body_regions(mask, BoundingBox(40, 40, 20, 20))
    assert np.array_equal(out.bits, bits)


def test_erase_height_one_box():
    region = BoundingBox(0, 0, 10, 10)
    mask = SkinMask(region, np.ones((10, 10), dtype=bool))
    out = erase_body_regions(mask, BoundingBox(2, 4, 6, 1))
    assert not out.bits[4, 2:8].any()
    assert out.bits[3].all() and out.bits[5].all()


def test_erase_idempotent(rng):
    region = BoundingBox(0, 0, 64, 64)
    mask = SkinMask(region, rng.random((64, 64)) < 0.5)
    box = BoundingBox(10, 8, 30, 50)
    once = erase_body_regions(mask, box)
    twice = erase_body_regions(once, box)
    assert np.array_equal(once.bits, twice.bits)


def test_erase_band_contract():
    mask = SkinMask(BoundingBox(0, 0, 4, 4), np.zeros((4, 4), dtype=bool))
    with pytest.raises(ContractError):
        erase_body_regions(mask, BoundingBox(0, 0, 4, 4), keep_top=0.6,
                           keep_bottom=0.4)


# -- model files ----------------------------------------------------------------

def test_model_round_trip(tmp_path, rng):
    table = rng.random((8, 8, 8))
    model = SkinModel(8, table)
    path = tmp_path / "m.skn"
    save_skin_model(model, path)
    loaded = load_skin_model(path)
    assert loaded.bins == 8
    assert np.array_equal(loaded.table, table.astype("<f4").astype(np.float64))


def test_model_file_layout(tmp_path):
    model = SkinModel(2, np.full((2, 2, 2), 0.25))
    path = tmp_path / "m.skn"
    save_skin_model(model, path)
    data = path.read_bytes()
    assert data[:4] == b"SKN1"
    assert len(data) == 8 + 4 * 8
    assert int.from_bytes(data[4:8], "little") == 2


def test_model_bad_magic(tmp_path):
    path = tmp_path / "bad.skn"
    path.write_bytes(b"NOPE" + bytes(8))
    with pytest.raises(FormatError, match="magic"):
        load_skin_model(path)


def test_model_truncated(tmp_path):
    model = SkinModel(4, np.full((4, 4, 4), 0.5))
    path = tmp_path / "m.skn"
    save_skin_model(model, path)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(FormatError, match="bytes"):
        load_skin_model(path)


def test_model_rejects_out_of_range_values(tmp_path):
    model = SkinModel(2, np.full((2, 2, 2), 0.5))
    path = tmp_path / "m.skn"
    save_skin_model(model, path)
    data = bytearray(path.read_bytes())
    data[8:12] = np.array([1.5], "<f4").tobytes()
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError, match=r"\[0, 1\]"):
        load_skin_model(path)


def test_bundled_model_loads(skin_model):
    assert skin_model.bins == 64
    assert 0.0 <= skin_model.table.min() and skin_model.table.max() <= 1.0
