from onpath.core import dataset_to_json
from onpath.harness import (
    SamplerConfig,
    Tally,
    equivalence_run,
    greedy_exhaustive_run,
    necessity_run,
    roundtrip_run,
    sample_dataset,
)


class TestSampler:
    def test_deterministic(self):
        cfg = SamplerConfig()
        assert dataset_to_json(sample_dataset(cfg, 1, 5)) == dataset_to_json(sample_dataset(cfg, 1, 5))

    def test_respects_ranges(self):
        cfg = SamplerConfig(periods=3, max_size=2, max_K=2, distinct_x1=True)
        for i in range(50):
            ds = sample_dataset(cfg, 0, i)
            assert ds.T == 3 and len(ds) <= 2 and max(ds.space.sizes) <= 2
            assert ds.distinct_first_choices()


class TestTally:
    def test_counts_and_disagreements(self):
        t = Tally("x")
        t.add(True, True, 0)
        t.add(True, False, 1)
        assert t.total == 2 and t.agree == 1 and t.rate == 0.5
        assert t.to_json()["name"] == "x"


class TestSmallRuns:
    def test_equivalence(self):
        for tally in equivalence_run("two-period", SamplerConfig(), 100, 0).values():
            assert tally.rate == 1.0

    def test_roundtrip(self):
        assert roundtrip_run("naive", SamplerConfig(), 50, 0).rate == 1.0

    def test_greedy(self):
        assert greedy_exhaustive_run(SamplerConfig(max_K=6), 100, 0).rate == 1.0

    def test_necessity(self):
        t = necessity_run("strict-nash", 50, 0)
        assert t.total == 50 and t.rate == 1.0
