"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed
in the terminal summary."""

from __future__ import annotations

import random
import time

from csrdigest.baselines import bertino_attribute_digest, dom_hash_digest
from csrdigest.bench import ORDER, count_hashes, ordering_verdicts, run_sweep, sweep_range
from csrdigest.costmodel import hash_count_sum, hash_count_W, node_count_N, node_count_sum
from csrdigest.csr import Facet, content_integrity, csr_digest, timestamped_seal, verify
from csrdigest.demo import CONTEXT, SCENARIOS, TARGET, load_certificate
from csrdigest.hashing import HashAlgorithm, HashCounter
from csrdigest.manifest import IntegrityManifest, emit_manifest, parse_manifest, parse_sti, validate_schema
from csrdigest.tree import (
    XmlNode,
    insert_at,
    label_at,
    node_at,
    parse_document,
    path_at,
    remove_at,
    replace_at,
    selector_at,
    serialize,
    walk,
)
from randtrees import find_id, random_tree, random_timestamp

TRIALS = 1000

PUBLISHED_STI = """<STI name="structure integrity" xmlns="http://www.example.org">
  <STIGenerate Algorithm="http://www.example.org/xmldsig-csr/#STI" />
  <DigestMethod
    Algorithm="http://www.w3.org/2000/09/xmldsig#sha1"/>
  <DigestValue>49-2A-ED-1A-5A-E1-BD-9C-59-04-19-58-8F-B7-08-5C-19-14-15-11</DigestValue>
</STI>"""


def _is_within(pos, ancestor) -> bool:
    return pos[: len(ancestor)] == tuple(ancestor)


def _relocate(rng: random.Random, tree: XmlNode, source):
    """Detach the subtree at ``source`` and reinsert it at a random place.

    Returns (new tree, new position) or None when the node's label is unchanged.
    """
    pruned, subtree = remove_at(tree, source)
    parent = rng.choice([p for p, _ in walk(pruned)])
    index = rng.randint(0, len(node_at(pruned, parent).children))
    moved = insert_at(pruned, parent, index, subtree)
    new_pos = parent + (index,)
    if label_at(new_pos) == label_at(source):
        return None
    return moved, new_pos


def _count(fn, *args, **kw) -> int:
    counter = HashCounter()
    fn(*args, counter=counter, **kw)
    return counter.count


def test_criterion_1_hash_count_ordering(record_property):
    """1. hash-count ordering csr < domhash < bertino on the depth sweep, SHA1 and SHA256"""
    t0 = time.perf_counter()
    results = run_sweep("depth", sweep_range(10, 150, 10), ("sha1", "sha256"), ORDER, repeat=1)
    elapsed = time.perf_counter() - t0
    verdicts = ordering_verdicts(results)
    assert len(verdicts) == 15 * 2
    failing = [(algo, value) for _, algo, value, ok in verdicts if not ok]
    record_property("detail", f"{len(verdicts) - len(failing)}/{len(verdicts)} points, {elapsed:.1f}s")
    assert not failing
    assert elapsed < 60


def test_criterion_2_per_node_counts(cert):
    """2. per-node hash counts match the construction exactly"""
    rng = random.Random(2)
    trees = [cert] + [random_tree(rng) for _ in range(500)]
    for tree in trees:
        for _, node in walk(tree):
            nodes = [n for _, n in walk(node)]
            internal = sum(1 for n in nodes if n.children)
            assert _count(content_integrity, node) == 2 * internal + (len(nodes) - internal)
    for name, value in [("id", "myDate"), ("lang", ""), ("x", "é" * 100)]:
        assert _count(bertino_attribute_digest, name, value) == 3
    a = parse_document(b"<a/>")
    assert _count(csr_digest, a, "/a") == 3
    assert _count(dom_hash_digest, a) == 3


def test_criterion_3_relocation_changes_csr(record_property):
    """3. relocating a signed subtree (new level or sibling order) changes CSR"""
    rng = random.Random(31)
    trials = changed = 0
    while trials < TRIALS:
        tree = random_tree(rng, min_nodes=3)
        source = rng.choice([p for p, _ in walk(tree) if p])
        algo = rng.choice(list(HashAlgorithm))
        relocated = _relocate(rng, tree, source)
        if relocated is None:
            continue
        moved, new_pos = relocated
        node_id = node_at(tree, source).attribute("id")
        assert find_id(moved, node_id) == new_pos
        before = csr_digest(tree, selector_at(tree, source), (), algo)
        after = csr_digest(moved, selector_at(moved, new_pos), (), algo)
        trials += 1
        if before.csr != after.csr:
            changed += 1
            # the content facet alone would not have noticed
            assert before.ci == after.ci
            manifest = IntegrityManifest.from_digest(before, selector_at(moved, new_pos))
            assert verify(moved, manifest).facet is Facet.STRUCTURE
    record_property("detail", f"{changed}/{trials} trials changed")
    assert changed == trials


def test_criterion_4_context_mutation_changes_csr(record_property):
    """4. mutating a context-related element (content or position) changes CSR"""
    rng = random.Random(41)
    trials = changed = 0
    kinds = {"content": 0, "position": 0}
    while trials < TRIALS:
        tree = random_tree(rng, min_nodes=4)
        positions = [p for p, _ in walk(tree)]
        v = rng.choice(positions)
        disjoint = [p for p in positions if p and not _is_within(p, v) and not _is_within(v, p)]
        if not disjoint:
            continue
        w = rng.choice(disjoint)
        v_id, w_id = node_at(tree, v).attribute("id"), node_at(tree, w).attribute("id")
        kind = rng.choice(["content", "position"])
        if kind == "content":
            inner = rng.choice([p for p, _ in walk(tree) if _is_within(p, w)])
            node = node_at(tree, inner)
            if rng.random() < 0.5:
                mutated = replace_at(tree, inner, node.replace(value=node.value + "!"))
            else:
                attrs = dict(node.attributes)
                attrs["x"] = attrs.get("x", "") + "?"
                mutated = replace_at(tree, inner, node.replace(attributes=tuple(attrs.items())))
        else:
            relocated = _relocate(rng, tree, w)
            if relocated is None:
                continue
            mutated = relocated[0]
        algo = rng.choice(list(HashAlgorithm))
        before = csr_digest(tree, selector_at(tree, v), [selector_at(tree, w)], algo)
        new_v, new_w = find_id(mutated, v_id), find_id(mutated, w_id)
        after = csr_digest(mutated, selector_at(mutated, new_v), [selector_at(mutated, new_w)], algo)
        trials += 1
        kinds[kind] += 1
        if before.csr != after.csr:
            changed += 1
            assert before.cri != after.cri
    record_property(
        "detail", f"{changed}/{trials} trials changed ({kinds['content']} content, {kinds['position']} position)"
    )
    assert changed == trials


def test_criterion_5_copy_and_timestamp(record_property):
    """5. copies into other documents or under other timestamps are detected; true duplicates agree"""
    rng = random.Random(51)
    structural = sealed = identical = 0
    trials = 0
    while trials < TRIALS:
        t1 = random_timestamp(rng)
        t2 = random_timestamp(rng)
        if t1 == t2:
            continue
        doc = random_tree(rng, min_nodes=3).replace(attributes=(("created", t1),))
        pos = rng.choice([p for p, _ in walk(doc) if p])
        target = selector_at(doc, pos)

        # (a) copy into a structurally different document
        host = random_tree(rng, ids=False)
        parent = rng.choice([p for p, _ in walk(host)])
        index = rng.randint(0, len(node_at(host, parent).children))
        copied = insert_at(host, parent, index, node_at(doc, pos))
        new_pos = parent + (index,)
        if path_at(copied, new_pos).rendered == path_at(doc, pos).rendered:
            continue
        trials += 1
        original = csr_digest(doc, target)
        if csr_digest(copied, selector_at(copied, new_pos)).csr != original.csr:
            structural += 1

        # (b) identical document, different creation timestamp
        timestamped_seal(original, t1)
        other = doc.replace(attributes=(("created", t2),))
        other_digest = csr_digest(other, target)
        assert other_digest.csr == original.csr
        timestamped_seal(other_digest, t2)
        manifest = IntegrityManifest.from_digest(original, target)
        if other_digest.seal != original.seal and verify(other, manifest).facet is Facet.TIMESTAMP:
            sealed += 1

        # (c) same timestamp, structure and content: an independent copy agrees
        twin = parse_document(serialize(doc))
        twin_digest = csr_digest(twin, target)
        timestamped_seal(twin_digest, t1)
        if (twin_digest.csr, twin_digest.seal) == (original.csr, original.seal) and verify(twin, manifest):
            identical += 1
    record_property(
        "detail", f"structure {structural}/{trials}, seal {sealed}/{trials}, identical {identical}/{trials}"
    )
    assert structural == sealed == identical == trials


def test_criterion_6_cost_model_closed_forms():
    """6. cost-model closed forms equal direct summation for 2<=k<=5, 1<=m<=10"""
    for k in range(2, 6):
        for m in range(1, 11):
            assert node_count_N(k, m) == node_count_sum(k, m)
            assert hash_count_W(k, m) == hash_count_sum(k, m)
    assert (node_count_N(2, 3), hash_count_W(2, 3)) == (7, 17)


def test_criterion_7_format_conformance(record_property):
    """7. emitted manifests validate, published STI digest decodes, parse of emit is the identity"""
    assert parse_sti(PUBLISHED_STI).digest_value == bytes(
        [0x49, 0x2A, 0xED, 0x1A, 0x5A, 0xE1, 0xBD, 0x9C, 0x59, 0x04,
         0x19, 0x58, 0x8F, 0xB7, 0x08, 0x5C, 0x19, 0x14, 0x15, 0x11]
    )
    rng = random.Random(71)
    count = with_cri = 0
    for i in range(150):
        tree = random_tree(rng, min_nodes=2)
        positions = [p for p, _ in walk(tree)]
        target = selector_at(tree, rng.choice(positions))
        context = [selector_at(tree, p) for p in sorted(rng.sample(positions, rng.randint(0, 3)))]
        algo = list(HashAlgorithm)[i % 2]
        encoding = ("base64", "hex")[(i // 2) % 2]
        digest = csr_digest(tree, target, context, algo)
        if rng.random() < 0.5:
            timestamped_seal(digest, random_timestamp(rng))
        xml = emit_manifest(digest, target, context, encoding=encoding)
        root = parse_document(xml)
        facets = {c.name: c for c in root.children}
        assert validate_schema(facets["STI"], "STI")
        if context:
            assert validate_schema(facets["CRI"], "CRI")
            with_cri += 1
        parsed = parse_manifest(xml)
        assert parsed == IntegrityManifest.from_digest(digest, target, context)
        assert parsed.to_xml(encoding) == xml
        count += 1
    record_property("detail", f"{count} manifests, {with_cri} with CRI")
    assert count >= 100


def test_criterion_8_end_to_end(record_property, cert):
    """8. digest, emit, parse, verify closes on the fixture and random trees; demos detect their facet"""
    for target, context in [(TARGET, [CONTEXT]), (TARGET, []), ("/Certificate", []), ("/Certificate/Title", [TARGET])]:
        for algo in HashAlgorithm:
            digest = csr_digest(cert, target, context, algo)
            assert verify(cert, parse_manifest(emit_manifest(digest, target, context)))
    rng = random.Random(81)
    passed = 0
    for _ in range(100):
        tree = random_tree(rng)
        t = random_timestamp(rng) if rng.random() < 0.5 else None
        if t is not None:
            tree = tree.replace(attributes=tree.attributes + (("created", t),))
        positions = [p for p, _ in walk(tree)]
        target = selector_at(tree, rng.choice(positions))
        context = [selector_at(tree, p) for p in sorted(rng.sample(positions, rng.randint(0, min(2, len(positions)))))]
        digest = csr_digest(tree, target, context, rng.choice(list(HashAlgorithm)))
        if t is not None:
            timestamped_seal(digest, t)
        manifest = parse_manifest(emit_manifest(digest, target, context, encoding=rng.choice(["base64", "hex"])))
        if verify(tree, manifest):
            passed += 1
    expected = {"relocate": Facet.STRUCTURE, "copy": Facet.TIMESTAMP, "context-swap": Facet.CONTEXT}
    demos = {name: fn() for name, fn in SCENARIOS.items()}
    record_property("detail", f"random trees {passed}/100, demos " + ", ".join(
        f"{n}={r.verdict.facet.value if r.verdict.facet else 'pass'}" for n, r in demos.items()))
    assert passed == 100
    for name, result in demos.items():
        assert result.ok and result.verdict.facet is expected[name]
    assert load_certificate() == cert  # the bundled fixture is left untouched


def test_criterion_9_timing_trend_soft(record_property):
    """9. timing trend csr <= domhash <= bertino at depth >= 30 (soft, reported only)"""
    results = run_sweep("depth", sweep_range(30, 150, 10), ("sha1",), ORDER, repeat=15)
    verdicts = ordering_verdicts(results, key="median_ns")
    held = sum(ok for *_, ok in verdicts)
    share = held / len(verdicts)
    status = "meets" if share >= 0.9 else "below"
    record_property("detail", f"{held}/{len(verdicts)} points ({share:.0%}), {status} the 90% target")
    print(f"timing trend: {held}/{len(verdicts)} points hold ({share:.0%})")
    assert count_hashes("csr", load_certificate(), "sha1") > 0
