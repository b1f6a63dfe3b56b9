"""Reference AP / nDCG values for the C++ metric fixtures.

Independent straight-from-definition implementation; writes
tests/fixtures/metric_reference.hpp. Standard library only.
"""
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "tests/fixtures/metric_reference.hpp"


def ap(ranking, judged, threshold):
    rel = {d for d, g in judged.items() if g >= threshold}
    if not rel:
        return 0.0
    hits, total = 0, 0.0
    for r, d in enumerate(ranking, start=1):
        if d in rel:
            hits += 1
            total += hits / r
    return total / len(rel)


def ndcg(ranking, judged, k):
    dcg = sum((2 ** judged.get(d, 0) - 1) / math.log2(r + 1)
              for r, d in enumerate(ranking[:k], start=1))
    ideal = sorted(judged.values(), reverse=True)[:k]
    idcg = sum((2 ** g - 1) / math.log2(r + 1) for r, g in enumerate(ideal, start=1))
    return dcg / idcg if idcg > 0 else 0.0


FIXTURES = [
    # name, ranking, judgments, k, threshold
    ("two_relevant_one_gap", ["A", "C", "B"], {"A": 2, "B": 2}, 10, 2),
    ("graded_201", ["A", "B", "C"], {"A": 2, "C": 1}, 10, 2),
    ("perfect", ["A", "B", "C", "D"], {"A": 3, "B": 2, "C": 2}, 10, 2),
    ("nothing_retrieved", ["X", "Y", "Z"], {"A": 2, "B": 2}, 10, 2),
    ("unretrieved_relevant", ["A", "X", "Y"], {"A": 2, "B": 3, "C": 2}, 10, 2),
    ("binary_threshold_1", ["d1", "d2", "d3", "d4", "d5"],
     {"d2": 1, "d4": 1, "d9": 1}, 10, 1),
    ("grade1_below_threshold", ["A", "B", "C"], {"A": 1, "B": 2, "C": 1}, 10, 2),
    ("cutoff_k1", ["B", "A", "C"], {"A": 3, "B": 3, "C": 1}, 1, 2),
    ("cutoff_k3_long", ["a", "b", "c", "d", "e", "f"],
     {"d": 3, "a": 1, "f": 2, "z": 2}, 3, 2),
    ("deep_ranks", [f"d{i:02d}" for i in range(1, 16)],
     {"d03": 2, "d07": 3, "d11": 2, "d15": 1, "d20": 2}, 10, 2),
    ("inverted_order", ["C", "B", "A"], {"A": 3, "B": 2, "C": 1}, 10, 1),
    ("no_relevant_judged", ["A", "B"], {"A": 0, "B": 1}, 10, 2),
    ("all_relevant_reversed_grades", ["E", "D", "C", "B", "A"],
     {"A": 4, "B": 3, "C": 2, "D": 1, "E": 0}, 5, 2),
]


def cpp_list(items):
    return "{" + ", ".join(f'"{x}"' for x in items) + "}"


def cpp_map(d):
    return "{" + ", ".join(f'{{"{k}", {v}}}' for k, v in d.items()) + "}"


def main():
    lines = [
        "// Generated by tools/oracles/metrics_oracle.py; do not edit by hand.",
        "#pragma once",
        "",
        "#include <map>",
        "#include <string>",
        "#include <vector>",
        "",
        "namespace eclipse::testing {",
        "",
        "struct MetricReference {",
        "  const char* name;",
        "  std::vector<std::string> ranking;",
        "  std::map<std::string, int> judgments;",
        "  std::size_t k;",
        "  int threshold;",
        "  double ap;",
        "  double ndcg;",
        "};",
        "",
        "inline const std::vector<MetricReference>& metric_references() {",
        "  static const std::vector<MetricReference> refs = {",
    ]
    for name, ranking, judged, k, thr in FIXTURES:
        lines.append(
            f'      {{"{name}", {cpp_list(ranking)}, {cpp_map(judged)}, {k}, {thr}, '
            f"{ap(ranking, judged, thr)!r}, {ndcg(ranking, judged, k)!r}}},")
    lines += ["  };", "  return refs;", "}", "", "}  // namespace eclipse::testing", ""]
    OUT.write_text("\n".join(lines))
    for name, ranking, judged, k, thr in FIXTURES:
        print(f"{name:32s} ap={ap(ranking, judged, thr):.6f} ndcg={ndcg(ranking, judged, k):.6f}")


if __name__ == "__main__":
    main()
