# Copyright 2026 The Laconic Authors
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
# with the License. You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software distributed under the License
# is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
# or implied. See the License for the specific language governing permissions and limitations under the License.

import math

import pytest

import _laconic as lax


def test_dot():
    assert lax.dot(8, [(1, 2.0), (3, 1.0)], [(1, 3.0), (5, 4.0)]) == 6.0
    assert lax.dot(8, [(0, 1.0)], [(1, 1.0)]) == 0.0
    # Densify oracle: [0,2,0,1] . [3,1,0,5] = 2*1 + 1*5 = 7
    assert lax.dot(4, [(1, 2.0), (3, 1.0)], [(0, 3.0), (1, 1.0), (3, 5.0)]) == 7.0
    # Entry order is caller's choice; duplicates are not.
    assert lax.dot(8, [(3, 1.0), (1, 2.0)], [(1, 3.0)]) == 6.0
    with pytest.raises(ValueError):
        lax.dot(4, [(0, 1.0)], [(9, 1.0)])
    with pytest.raises(ValueError):
        lax.dot(4, [(2, 1.0), (2, 1.0)], [(0, 1.0)])


def test_splade_pool():
    pooled = dict(lax.splade_pool([[0.0, math.e - 1.0], [-3.0, -4.0]]))
    assert pooled == {1: pytest.approx(1.0)}
    assert lax.splade_pool([[-1.0, -2.0]]) == []


def test_infonce_uniform_is_log_k():
    scores = [[0.5, 0.5, 0.5, 0.5]]
    assert lax.infonce(scores, [2]) == pytest.approx(math.log(4.0), abs=1e-12)


def test_flops_and_warmup():
    assert lax.flops_reg(2, [[(0, 1.0)], [(1, 1.0)]]) == pytest.approx(0.5, abs=1e-12)
    assert lax.warmup(50, 100) == pytest.approx(0.25, abs=1e-12)
    assert lax.warmup(0, 100) == 0.0
    assert lax.warmup(100, 100) == 1.0


def test_ndcg_hand_example():
    run = {"q1": [("d2", 9.0), ("d1", 5.0)]}
    qrels = {"q1": {"d1": 3, "d2": 1}}
    assert lax.ndcg_at_k(run, qrels, 2) == pytest.approx(0.7098097413968655, abs=1e-9)
    assert lax.recall_at_k(run, qrels, 1) == pytest.approx(0.5)


def test_memory_estimates():
    assert lax.estimate_memory_dense(8841823, 4096, 4) == 8841823 * 4096 * 4
    assert lax.estimate_memory_sparse(1000, 8, 100) == 8100


def test_exact_index_search_ordering():
    corpus = [
        ("doc-a", [(1, 2.0), (3, 1.0)]),
        ("doc-b", [(1, 1.0), (5, 4.0)]),
        ("doc-c", [(3, 3.0)]),
    ]
    idx = lax.ExactIndex.build(8, corpus)
    assert idx.doc_count == 3
    assert idx.total_postings == 5
    hits = idx.search([(1, 1.0)], 10)
    assert [h[0] for h in hits] == ["doc-a", "doc-b"]
    assert hits[0][1] == 2.0


def test_approx_degenerate_matches_exact(tmp_path):
    corpus = [
        ("doc-a", [(1, 2.0), (3, 1.0)]),
        ("doc-b", [(1, 1.0), (5, 4.0)]),
        ("doc-c", [(3, 3.0)]),
    ]
    exact = lax.ExactIndex.build(8, corpus)
    approx = lax.ApproxIndex.build(8, corpus, alpha=1.0, block_size=1, summary_levels=256, heap_factor=1.0)
    query = [(1, 1.0), (3, 2.0)]
    assert approx.search(query, 10) == exact.search(query, 10)

    path = str(tmp_path / "idx.lcnx")
    exact.save(path)
    loaded = lax.load_index(path)
    assert loaded.search(query, 10) == exact.search(query, 10)
