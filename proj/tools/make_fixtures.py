#!/usr/bin/env python3
# Copyright 2026 The Self-Talk QA Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the toy-model fixtures under data/fixtures.

Outputs are deterministic; rerunning overwrites them byte-identically.
"""

import hashlib
import json
import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "fixtures"


def dump(path, doc):
  path.parent.mkdir(parents=True, exist_ok=True)
  path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def lg(p):
  return math.log2(p)


# --- tiny bigram -----------------------------------------------------------

def tiny_bigram():
  vocab = ["<unk>", "</s>", "the", "a", "cat", "dog", "sat", "ran", "on",
           "mat", "away", "."]
  # Complete rows only, except "dog", which backs off to the unigram table.
  uni = {"<unk>": 1 / 16, "</s>": 1 / 16, "the": 1 / 8, "a": 1 / 16,
         "cat": 1 / 8, "dog": 1 / 8, "sat": 1 / 16, "ran": 1 / 16,
         "on": 1 / 16, "mat": 1 / 16, "away": 1 / 16, ".": 1 / 8}
  rows = {
      "the": {"cat": 1 / 2, "dog": 1 / 4, "mat": 1 / 4},
      "a": {"cat": 1 / 2, "dog": 1 / 2},
      "cat": {"sat": 1 / 2, "ran": 1 / 4, ".": 1 / 4},
      "dog": {"ran": 1 / 2},
      "sat": {"on": 1.0},
      "ran": {"away": 1 / 2, "on": 1 / 4, ".": 1 / 4},
      "on": {"the": 1 / 2, "a": 1 / 2},
      "mat": {".": 1.0},
      "away": {".": 1.0},
      ".": {"</s>": 1 / 2, "the": 1 / 4, "a": 1 / 4},
  }
  tables = {"": {w: lg(p) for w, p in uni.items()}}
  for h, row in rows.items():
    tables[h] = {w: lg(p) for w, p in row.items()}
  dump(OUT / "tiny_bigram.model",
       {"name": "tiny-bigram", "order": 2, "unk": "<unk>", "end": "</s>",
        "vocabulary": vocab, "tables": tables})


# --- flip benchmark --------------------------------------------------------

NAMES = ["Ana", "Ben", "Cleo", "Dev", "Eli", "Fay", "Gus", "Hana", "Ivo",
         "Jia", "Kai", "Lena", "Milo", "Nia", "Omar", "Pia", "Quin", "Rosa",
         "Sam", "Tess", "Uma", "Vik", "Wren", "Xavi", "Yara", "Zed", "Abe",
         "Bea", "Cal", "Dina", "Emil", "Fern", "Gil", "Hugo", "Iris", "Jon",
         "Kira", "Leo", "Mara", "Ned"]
VERBS = ["dropped", "opened", "wanted", "needed", "spotted", "carried"]
OBJECTS = ["glass", "box", "door", "bag", "note", "jar"]
POPULAR = ["rest", "wait", "leave"]
# rare action -> the tool whose mention points at it
LINKS = {"sweep": "broom", "climb": "ladder", "dry": "towel", "cook": "pan",
         "write": "pen", "paint": "brush", "fix": "wrench", "plant": "seed",
         "read": "book", "swim": "pool"}
NEUTRAL = ["hat", "friend", "coat", "map"]


def flip_bench():
  rng = random.Random(0)
  rare = sorted(LINKS)
  # (gold is rare, tool points at gold, tool points at distractor)
  plan = ([("useful", True)] * 20 + [("unhelped", True)] * 4 +
          [("kept", False)] * 14 + [("harmful", False)] * 2)
  rng.shuffle(plan)
  instances, tool_of = [], {}
  for i, (kind, gold_rare) in enumerate(plan):
    name = NAMES[i]
    r = rare[i % len(rare)]
    p = POPULAR[i % len(POPULAR)]
    gold, other = (r, p) if gold_rare else (p, r)
    tool = {"useful": LINKS[r], "harmful": LINKS[r]}.get(
        kind, NEUTRAL[i % len(NEUTRAL)])
    tool_of[name.lower()] = tool
    context = f"{name} {VERBS[i % len(VERBS)]} the {OBJECTS[i % len(OBJECTS)]}."
    choices = [gold + ".", other + "."]
    g = rng.randrange(2)
    if g == 1:
      choices.reverse()
    instances.append({"id": f"flip-{i:02d}", "context": context,
                      "choices": choices, "gold": g})

  d = OUT / "flip_bench"
  d.mkdir(parents=True, exist_ok=True)
  (d / "dev.jsonl").write_text(
      "".join(json.dumps(x, sort_keys=True) + "\n" for x in instances))
  dump(d / "task.json", {
      "name": "flipbench", "task_id": "custom",
      "combine_templates": {"default": "[context] [choice]"},
      "prefix_pairs": [{"question_prefix": "What does X need?",
                        "answer_prefix_template": "X needs"}],
      "subject_placeholder": "X"})

  names = [n.lower() for n in NAMES]
  tools = sorted(set(LINKS.values()) | set(NEUTRAL))
  vocab = sorted(set(["<unk>", "</s>", ".", "?", "the", "a", "what", "does",
                      "need", "needs"] + names + VERBS + OBJECTS + POPULAR +
                     rare + tools))
  uniform = {w: lg(1 / len(vocab)) for w in vocab}

  # Generator: deterministic "<name> needs a <tool> ." after the prompt.
  gen = {"": uniform}
  for n in names:
    gen[f"{n} needs"] = {"a": 0.0}
    gen[f"{n} needs a"] = {tool_of[n]: 0.0}
  for t in tools:
    gen[t] = {".": 0.0}
  dump(d / "generator.model", {"name": "flip-generator", "order": 4,
                                "unk": "<unk>", "end": "</s>",
                                "vocabulary": vocab, "tables": gen})

  # Scorer: popular actions are likely after a period; a tool followed by a
  # period makes its linked action likely.
  sc = {"": uniform}
  row = {w: lg(0.15) for w in POPULAR}
  row.update({w: lg(0.015) for w in rare})
  sc["."] = row
  sc["needs"] = {"a": lg(0.95)}
  sc["a"] = {t: lg(0.9 / len(tools)) for t in tools}
  for t in tools:
    sc[t] = {".": lg(0.95)}
  for w in POPULAR + rare:
    sc[w] = {".": lg(0.95)}
  for action, tool in LINKS.items():
    sc[f"{tool} ."] = {action: lg(0.9)}
  dump(d / "scorer.model", {"name": "flip-scorer", "order": 3,
                             "unk": "<unk>", "vocabulary": vocab,
                             "tables": sc})


# --- report run records ----------------------------------------------------

def write_run(run_dir, files):
  """Writes eval records plus a manifest listing their digests."""
  run_dir.mkdir(parents=True, exist_ok=True)
  outputs = []
  for name, doc in files.items():
    data = (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()
    (run_dir / name).write_bytes(data)
    outputs.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(),
                    "bytes": len(data)})
  manifest = {"version": "1.0.0", "config": {"fixture": True},
              "started_at": "2026-01-01T00:00:00Z",
              "finished_at": "2026-01-01T00:00:00Z",
              "counts": {"instances": 0}, "outputs": outputs}
  (run_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def eval_record(task, split, gold, correct, scorer, knowledge="none",
                generator=""):
  """An eval record whose first `correct` instances are predicted right."""
  ids = sorted(gold)
  predicted = {}
  for k, i in enumerate(ids):
    predicted[i] = gold[i] if k < correct else 1 - gold[i]
  n = len(ids)
  majority = max(sum(1 for g in gold.values() if g == c) for c in (0, 1))
  digest = hashlib.sha256("".join(i + "\n" for i in ids).encode()).hexdigest()
  return {"task": task, "split": split, "scorer": scorer,
          "generator": generator, "knowledge": knowledge,
          "mode": "baseline" if knowledge == "none" else "clarified",
          "n_instances": n, "correct": correct, "majority_count": majority,
          "accuracy": 100.0 * correct / n,
          "majority_accuracy": 100.0 * majority / n,
          "instance_digest": digest, "predicted": predicted, "gold": gold}


def report_runs():
  d = OUT / "report_runs"
  # 200 dev instances, 110 of them labelled 0.
  copa = {f"copa-dev-{i:03d}": 0 if i < 110 else 1 for i in range(200)}
  base = {"Distil-GPT2": 106, "GPT2-L": 104}

  def baseline(lm):
    return eval_record("copa", "dev", copa, base[lm], lm)

  write_run(d / "copa_distil_baseline", {"eval.json": baseline("Distil-GPT2")})
  write_run(d / "copa_gpt2l_baseline", {"eval.json": baseline("GPT2-L")})
  for lm, tag, correct in [("GPT2-L", "gpt2l", 138),
                           ("Distil-GPT2", "distil", 113)]:
    write_run(d / f"copa_{tag}_comet", {
        "baseline_eval.json": baseline(lm),
        "eval.json": eval_record("copa", "dev", copa, correct, lm,
                                 "generative", "COMET")})
  write_run(d / "copa_distil_selftalk_distil", {
      "baseline_eval.json": baseline("Distil-GPT2"),
      "eval.json": eval_record("copa", "dev", copa, 132, "Distil-GPT2",
                               "selftalk", "Distil-GPT2")})

  # 1000 dev instances; all sources combined lifts 58.8 to 66.7.
  mctaco = {f"mctaco-dev-{i:04d}": 0 if i < 600 else 1 for i in range(1000)}
  write_run(d / "mctaco_gpt2_all", {
      "baseline_eval.json": eval_record("mctaco", "dev", mctaco, 588, "GPT2"),
      "eval.json": eval_record("mctaco", "dev", mctaco, 667, "GPT2", "all",
                               "GPT2")})


if __name__ == "__main__":
  tiny_bigram()
  flip_bench()
  report_runs()
