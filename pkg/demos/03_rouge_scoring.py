"""ROUGE-1 / ROUGE-2 scoring walkthrough.

Shows per-pair scores, the clipped-overlap behavior on repeated words, and
the corpus-level report table.
"""

from pointer_gpt.rouge import (format_report_table, rouge_n, rouge_report)

candidate = "the cat sat on the mat"
reference = "the cat lay on the mat"

for n in (1, 2):
    s = rouge_n(candidate, reference, n)
    print("Rouge-%d  P=%.4f  R=%.4f  F=%.4f"
          % (n, s.precision, s.recall, s.f_measure))

# clipping: "the the the" only gets credit for as many "the" as the
# reference actually contains
s = rouge_n("the the the", "the cat", 1)
print("\nclipped overlap: P=%.4f (1 of 3 candidate tokens credited)"
      % s.precision)

# corpus-level report: the mean of per-pair precision/recall/F
candidates = [
    "mild cough and fever .",
    "vitals stable .",
    "patient has chronic back pain .",
]
references = [
    "mild cough and fever .",
    "stable vitals .",
    "chronic back pain .",
]
report = rouge_report(candidates, references)
print()
print(format_report_table([("demo system", report)]))
