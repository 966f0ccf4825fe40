import csv
import io
import json

import pytest

from wedgeprob.errors import ValidationError
from wedgeprob.experiments import ExperimentConfig, RankRecord, omega_from_spec, run_experiment


def strip_timing(report):
    d = report.to_dict()
    d["provenance"].pop("wall_time_s")
    d["config"].pop("workers")
    return d


def test_report_consistency():
    rep = run_experiment(ExperimentConfig(2, 2, [1, 2, 4], samples=60, master_seed=3))
    for rec in rep.records:
        assert rec.certified_entangled + rec.certified_separable + rec.undecided == rec.samples == 60
        assert sum(rec.tuple_rank_histogram.values()) == 60
        assert sum(rec.state_rank_histogram.values()) == 60
        assert rec.ci_low <= rec.entangled_fraction <= rec.ci_high
        # mn = 4: PPT decides every sample
        assert rec.undecided == 0
    assert rep.provenance["ppt_exact"] and rep.provenance["seed"] == 3


def test_workers_do_not_change_report():
    base = dict(n=2, m=3, r_list=[2, 3], samples=24, master_seed=9)
    one = run_experiment(ExperimentConfig(**base, workers=1))
    many = run_experiment(ExperimentConfig(**base, workers=8))
    assert strip_timing(one) == strip_timing(many)


def test_same_seed_same_report_different_seed_differs():
    cfg = ExperimentConfig(2, 2, [4], samples=40, master_seed=1)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert strip_timing(a) == strip_timing(b)
    c = run_experiment(ExperimentConfig(2, 2, [4], samples=40, master_seed=2))
    assert strip_timing(a)["records"] != strip_timing(c)["records"]


def test_zero_samples():
    rep = run_experiment(ExperimentConfig(2, 2, [2], samples=0))
    rec = rep.record(2)
    assert rec.samples == 0 and rec.entangled_fraction is None and rec.ci_low is None
    assert json.loads(rep.to_json())["records"][0]["samples"] == 0


def test_merge_is_commutative_monoid():
    a = RankRecord(2, samples=3, certified_entangled=1, tuple_rank_histogram={2: 3}, min_wedge_margin=0.3)
    b = RankRecord(2, samples=2, undecided=2, tuple_rank_histogram={1: 1, 2: 1}, min_wedge_margin=0.1)
    assert a.merge(b) == b.merge(a)
    assert a.merge(RankRecord(2)) == a.merge(RankRecord(2)) and a.merge(RankRecord(2)).samples == 3
    assert a.merge(b).tuple_rank_histogram == {2: 4, 1: 1}
    assert a.merge(b).min_wedge_margin == 0.1
    with pytest.raises(ValueError):
        a.merge(RankRecord(3))


def test_csv_has_one_row_per_r_with_config_echo():
    rep = run_experiment(ExperimentConfig(2, 2, [1, 2], samples=5, master_seed=4))
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert [int(r["r"]) for r in rows] == [1, 2]
    assert json.loads(rows[0]["config"])["master_seed"] == 4 and rows[0]["seed"] == "4"


@pytest.mark.parametrize("kwargs", [
    dict(n=3, m=2, r_list=[1], samples=1),
    dict(n=2, m=2, r_list=[5], samples=1),
    dict(n=2, m=2, r_list=[], samples=1),
    dict(n=2, m=2, r_list=[1], samples=-1),
    dict(n=2, m=2, r_list=[1], samples=1, tests=("magic",)),
    dict(n=2, m=2, r_list=[1], samples=1, workers=0),
])
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        ExperimentConfig(**kwargs)


def test_config_dict_roundtrip_and_unknown_keys():
    cfg = ExperimentConfig(2, 3, [1, 2], samples=4, tests=("wedge",))
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({**cfg.to_dict(), "bogus": 1})


def test_omega_specs(tmp_path):
    assert omega_from_spec("maximally-mixed", 3).faithful
    a = omega_from_spec("random-faithful:5", 3)
    b = omega_from_spec("random-faithful:5", 3)
    assert (a.matrix == b.matrix).all() and a.faithful
    with pytest.raises(ValidationError):
        omega_from_spec("uniform", 3)
    p = tmp_path / "omega.json"
    p.write_text(json.dumps({"rows": 2, "cols": 2, "data": [[1, 0], [0, 0], [0, 0], [0, 0]]}))
    with pytest.raises(ValidationError):
        omega_from_spec(f"file:{p}", 2)
    with pytest.raises(ValidationError):
        omega_from_spec(f"file:{p}", 3)


def test_omega_does_not_change_law_of_entanglement():
    """NPT fraction at (2,2,4) agrees between omega = 1/2 and a random faithful omega."""
    samples = 3000
    fr = []
    for omega in ("maximally-mixed", "random-faithful:17"):
        rec = run_experiment(ExperimentConfig(2, 2, [4], samples, master_seed=8, omega=omega,
                                              tests=("ppt",))).record(4)
        fr.append(rec.npt / samples)
    se = (sum(p * (1 - p) for p in fr) / samples) ** 0.5
    assert abs(fr[0] - fr[1]) < 4 * se
