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
#
# Regenerates tests/fixtures/eval_reference.json: random qrels/run instances with
# independently computed nDCG@10 and recall@10 means. Pure stdlib on purpose — this
# is the reference the C++ metrics are checked against, so it shares no code with them.

import json
import math
import random
from pathlib import Path

K = 10


def ndcg_mean(run, qrels, k):
    total = 0.0
    evaluated = 0
    for qid, judged in qrels.items():
        ideal = sorted(judged.values(), reverse=True)
        idcg = sum((2**rel - 1) / math.log2(i + 2) for i, rel in enumerate(ideal[:k]))
        if idcg <= 0.0:
            continue  # no relevant material: query cannot be ranked well or badly
        evaluated += 1
        ranking = run.get(qid, [])
        dcg = sum(
            (2 ** judged.get(doc, 0) - 1) / math.log2(i + 2)
            for i, (doc, _score) in enumerate(ranking[:k])
        )
        total += dcg / idcg
    return total / evaluated if evaluated else 1.0


def recall_mean(run, qrels, k):
    total = 0.0
    evaluated = 0
    for qid, judged in qrels.items():
        relevant = {doc for doc, rel in judged.items() if rel > 0}
        if not relevant:
            continue
        evaluated += 1
        retrieved = {doc for doc, _score in run.get(qid, [])[:k]}
        total += len(retrieved & relevant) / len(relevant)
    return total / evaluated if evaluated else 1.0


def make_instance(rng):
    qrels = {}
    run = {}
    n_queries = rng.randint(1, 8)
    for q in range(n_queries):
        qid = f"q{q:03d}"
        pool = [f"d{d:03d}" for d in range(rng.randint(3, 20))]
        judged_docs = rng.sample(pool, rng.randint(1, len(pool)))
        qrels[qid] = {doc: rng.randint(0, 3) for doc in judged_docs}
        if rng.random() < 0.15:
            continue  # judged query absent from the run
        ranked = rng.sample(pool, rng.randint(1, len(pool)))
        scored = [(doc, round(rng.uniform(0.01, 50.0), 4)) for doc in ranked]
        scored.sort(key=lambda e: (-e[1], e[0]))
        run[qid] = scored
    if rng.random() < 0.3:
        run["zz-unjudged"] = [("d000", 1.0)]
    return qrels, run


def main():
    rng = random.Random(20260815)
    instances = []
    for _ in range(50):
        qrels, run = make_instance(rng)
        instances.append(
            {
                "qrels": qrels,
                "run": run,
                "ndcg10": ndcg_mean(run, qrels, K),
                "recall10": recall_mean(run, qrels, K),
            }
        )
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "eval_reference.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({"k": K, "instances": instances}, indent=1, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(instances)} instances)")


if __name__ == "__main__":
    main()
