import pytest

from csrdigest.bench import (
    CSV_HEADER,
    MODELS,
    BenchResult,
    TreeSpec,
    count_hashes,
    export_results,
    format_table,
    generate_tree,
    ordering_verdicts,
    read_results,
    run_sweep,
    sweep_range,
)
from csrdigest.tree import walk


def _size(root):
    return sum(1 for _ in walk(root))


def test_generate_sizes():
    assert _size(generate_tree(TreeSpec(3))) == 16
    assert _size(generate_tree(TreeSpec(1))) == 6
    assert _size(generate_tree(TreeSpec(4, topology="width_flat"))) == 21
    assert TreeSpec(3).node_count == 16


def test_depth_chain_height():
    root = generate_tree(TreeSpec(7))
    assert max(len(p) for p, _ in walk(root)) == 7
    flat = generate_tree(TreeSpec(7, topology="width_flat"))
    assert max(len(p) for p, _ in walk(flat)) == 1


def test_generation_deterministic():
    spec = TreeSpec(5, payload=16)
    assert generate_tree(spec, 42) == generate_tree(spec, 42)
    assert generate_tree(spec, 42) != generate_tree(spec, 43)
    assert all(len(n.value) == 16 for _, n in walk(generate_tree(spec, 1)))


def test_invalid_spec():
    with pytest.raises(ValueError):
        TreeSpec(0)
    with pytest.raises(ValueError):
        TreeSpec(2, topology="star")


def test_sweep_range():
    assert sweep_range(10, 150, 10) == list(range(10, 151, 10))
    assert sweep_range(3, 3, 1) == [3]
    for bad in [(10, 5, 1), (1, 5, 0), (0, 5, 1)]:
        with pytest.raises(ValueError):
            sweep_range(*bad)


def test_full_sweep_cardinality():
    results = run_sweep("depth", sweep_range(10, 150, 10), repeat=1)
    assert len(results) == 15 * 4
    assert {r.model for r in results} == set(MODELS)


def test_run_sweep_errors():
    with pytest.raises(ValueError):
        run_sweep("height", [1])
    with pytest.raises(ValueError):
        run_sweep("depth", [])
    with pytest.raises(ValueError):
        run_sweep("depth", [1], models=["md5"])


def test_parallel_matches_sequential_counts():
    seq = run_sweep("depth", [2, 4, 6], repeat=1)
    par = run_sweep("depth", [2, 4, 6], repeat=1, jobs=2)
    key = lambda r: (r.model, r.algo, r.value, r.nodes, r.hash_count)  # noqa: E731
    assert [key(r) for r in seq] == [key(r) for r in par]


def test_export(tmp_path):
    empty = export_results([], tmp_path / "e.csv")
    assert empty.read_text().splitlines() == [",".join(CSV_HEADER)]
    one = export_results([BenchResult("csr", "sha1", "depth", 10, 51, 63, 1234)], tmp_path / "o.csv")
    assert one.read_text().splitlines() == [",".join(CSV_HEADER), "csr,sha1,depth,10,51,63,1234"]
    results = run_sweep("depth", sweep_range(10, 50, 10), ("sha1", "sha256"), repeat=1)
    path = export_results(results, tmp_path / "full.csv")
    assert read_results(path) == results


def test_read_rejects_foreign_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_results(p)


def test_export_unwritable(tmp_path):
    with pytest.raises(OSError):
        export_results([], tmp_path / "missing" / "x.csv")


@pytest.mark.parametrize("model", sorted(MODELS))
def test_count_monotone_in_depth(model):
    counts = [count_hashes(model, generate_tree(TreeSpec(d)), "sha1") for d in range(1, 40)]
    assert all(a < b for a, b in zip(counts, counts[1:]))


def test_depth_dominates_width_for_merkle_baseline():
    for d in range(1, 40):
        chain = count_hashes("bertino", generate_tree(TreeSpec(d)), "sha1")
        flat = count_hashes("bertino", generate_tree(TreeSpec(d, topology="width_flat")), "sha1")
        assert chain >= flat


def test_width_family_counts():
    # flat documents: every child is a bare leaf, so DOM-HASH pays one hash per
    # child and CSR one more than DOM-HASH overall (ST and combine vs. h(attr))
    for d in (1, 5, 30):
        root = generate_tree(TreeSpec(d, topology="width_flat"))
        n = 1 + 5 * d
        assert count_hashes("csr", root, "sha1") == n + 3
        assert count_hashes("domhash", root, "sha1") == n + 2
        assert count_hashes("bertino", root, "sha1") == 3 * n


def test_counts_algorithm_independent():
    root = generate_tree(TreeSpec(12))
    for model in MODELS:
        assert count_hashes(model, root, "sha1") == count_hashes(model, root, "sha256")


def test_ordering_verdicts_and_table():
    results = run_sweep("depth", [10, 20], repeat=1)
    verdicts = ordering_verdicts(results)
    assert [(a, al, v) for a, al, v, _ in verdicts] == [("depth", "sha1", 10), ("depth", "sha1", 20)]
    assert all(ok for *_, ok in verdicts)
    assert ordering_verdicts([r for r in results if r.model != "bertino"]) == []
    table = format_table(results)
    assert table.splitlines()[0].split()[:3] == ["model", "algo", "axis"]
    assert len(table.splitlines()) == 1 + len(results)
