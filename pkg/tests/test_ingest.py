import json
from pathlib import Path

import pytest

from conftest import build_assessment
from emgdiff.fixtures import make_pair, write_assessment, write_demo_dataset
from emgdiff.ingest import (
    Catalog,
    IngestError,
    NotFoundError,
    ingest,
    load_data_dir,
    load_manifest,
    validate_manifest,
)


@pytest.fixture
def pair_dir(tmp_path):
    from emgdiff.model import AFFECTED, UNAFFECTED, VideoRef

    affected, unaffected = make_pair(
        "P1", "shoulder_flexion", {"BIC": (2.0, 1.0)}, duration_s=1.5, rate=1000.0,
        seed=5,
        video={
            AFFECTED: VideoRef("video.mp4", 0.8),
            UNAFFECTED: VideoRef("video.mp4", 0.5),
        },
    )
    write_assessment(tmp_path, affected)
    write_assessment(tmp_path, unaffected)
    return tmp_path


def manifest_path(root, patient="P1", motion="shoulder_flexion", side="affected"):
    return Path(root) / patient / motion / side / "manifest.json"


class TestIngest:
    def test_well_formed_manifest_yields_assessment(self, pair_dir):
        manifest = load_manifest(manifest_path(pair_dir))
        a = ingest(manifest)
        assert len(a.channels) == 8
        assert all(ch.sample_rate == 1000.0 for ch in a.channels.values())
        assert all(ch.values_b is not None for ch in a.channels.values())
        assert a.motion is not None
        assert a.video is not None and a.video.offset_s == 0.8
        lo, hi = a.retained_interval
        assert lo == 0.0 and hi == pytest.approx(1.499)

    def test_time_regression_names_file_and_row(self, pair_dir):
        emg = manifest_path(pair_dir).parent / "emg.csv"
        lines = emg.read_text().splitlines()
        # corrupt the timestamp of data row 512
        cells = lines[512].split(",")
        cells[0] = "0.01"
        lines[512] = ",".join(cells)
        emg.write_text("\n".join(lines) + "\n")
        with pytest.raises(IngestError, match=r"irregular sampling: emg\.csv row 512"):
            ingest(load_manifest(manifest_path(pair_dir)))

    def test_rate_mismatch_names_row(self, pair_dir):
        mpath = manifest_path(pair_dir)
        raw = json.loads(mpath.read_text())
        raw["sample_rate_hz"] = 500.0
        mpath.write_text(json.dumps(raw))
        with pytest.raises(IngestError, match=r"sample rate mismatch: emg\.csv row 2"):
            ingest(load_manifest(mpath))

    def test_missing_mapped_column_named(self, pair_dir):
        mpath = manifest_path(pair_dir)
        raw = json.loads(mpath.read_text())
        raw["muscles"][0]["columns"] = ["NOPE"]
        mpath.write_text(json.dumps(raw))
        with pytest.raises(IngestError, match=r"missing column 'NOPE' in emg\.csv"):
            ingest(load_manifest(mpath))

    def test_nan_value_named_with_position(self, pair_dir):
        emg = manifest_path(pair_dir).parent / "emg.csv"
        lines = emg.read_text().splitlines()
        header = lines[0].split(",")
        cells = lines[40].split(",")
        cells[3] = "nan"
        lines[40] = ",".join(cells)
        emg.write_text("\n".join(lines) + "\n")
        with pytest.raises(
            IngestError, match=rf"invalid value: emg\.csv column {header[3]} row 40"
        ):
            ingest(load_manifest(manifest_path(pair_dir)))

    def test_missing_file_reported(self, pair_dir):
        (manifest_path(pair_dir).parent / "emg.csv").unlink()
        with pytest.raises(IngestError, match="file not found"):
            ingest(load_manifest(manifest_path(pair_dir)))

    def test_validate_manifest_collects_findings(self, pair_dir):
        findings = validate_manifest(manifest_path(pair_dir))
        assert all(f.ok for f in findings)
        (manifest_path(pair_dir).parent / "motion.csv").unlink()
        findings = validate_manifest(manifest_path(pair_dir))
        assert any(not f.ok and "motion" in f.path for f in findings)


class TestCatalog:
    def test_idempotent_reingestion(self, pair_dir):
        cat = load_data_dir(pair_dir)
        assert len(cat) == 2
        again = ingest(load_manifest(manifest_path(pair_dir)))
        cat.add(again)
        assert len(cat) == 2

    def test_pair_lookup_and_missing_side(self, pair_dir):
        cat = load_data_dir(pair_dir)
        a, u = cat.pair("P1", "shoulder_flexion")
        assert a.side == "affected" and u.side == "unaffected"
        with pytest.raises(NotFoundError, match="missing side"):
            cat.pair("P9", "shoulder_flexion")

    def test_query_no_filters_lists_everything(self, tmp_path):
        write_demo_dataset(tmp_path, seed=99)
        cat = load_data_dir(tmp_path)
        res = cat.query()
        assert len(res.items) == 6
        assert res.facets["patient"] == ["P01", "P02", "P03"]
        assert res.facets["side"] == ["affected", "unaffected"]

    def test_query_facets_narrow_by_other_selections(self, tmp_path):
        write_demo_dataset(tmp_path, seed=99)
        cat = load_data_dir(tmp_path)
        res = cat.query(patient="P01")
        assert res.facets["motion"] == ["shoulder_flexion"]
        # the patient facet itself stays wide open
        assert res.facets["patient"] == ["P01", "P02", "P03"]

    def test_fully_filtered_query_returns_at_most_one_per_side(self, tmp_path):
        write_demo_dataset(tmp_path, seed=99)
        cat = load_data_dir(tmp_path)
        res = cat.query(patient="P03", motion="wrist_rotation")
        assert len(res.items) == 2
        assert {a.side for a in res.items} == {"affected", "unaffected"}

    def test_large_catalog_filters_to_one_pair(self, rng):
        # 60 patients x 2 motions x 2 sides = 240 assessments
        cat = Catalog()
        vals = {"BIC": rng.normal(0, 1, 64)}
        for p in range(60):
            for motion in ("shoulder_flexion", "elbow_extension"):
                for side in ("affected", "unaffected"):
                    cat.add(
                        build_assessment(f"P{p:03d}", motion, side, vals, rate=1000.0)
                    )
        assert len(cat) == 240
        res = cat.query(patient="P007", motion="elbow_extension")
        assert len(res.items) == 2
        assert {a.side for a in res.items} == {"affected", "unaffected"}
        assert res.facets["motion"] == ["elbow_extension", "shoulder_flexion"]

    def test_facet_consistency_every_value_yields_results(self, tmp_path):
        write_demo_dataset(tmp_path, seed=99)
        cat = load_data_dir(tmp_path)
        base = {"patient": "P01", "motion": None, "side": "affected"}
        res = cat.query(patient=base["patient"], side=base["side"])
        for facet, values in res.facets.items():
            for value in values:
                probe = dict(base)
                probe[facet] = value
                check = cat.query(
                    patient=probe["patient"], motion=probe["motion"], side=probe["side"]
                )
                assert check.items, f"facet {facet}={value} yielded nothing"
