"""
Prince and Storytellers
=======================

The Prince is the paper most often cited together with the Sleeping
Beauty, among those published before it wakes up. Storytellers are the
papers that cite both of them between the Prince's year and the awakening.
"""

from dormancy import extract_triad, partition_groups, select_sleeping_beauties
from dormancy.corpus import yearly_citation_series
from dormancy.synth import SynthConfig, TriadSpec, generate_ca_corpus, plant_triad

corpus = generate_ca_corpus(SynthConfig(n_papers=10_000, refs_per_paper=5, seed=1))
truth = plant_triad(corpus, TriadSpec(n_st=6, n_sb_only=4, n_pr_only=5))
index = corpus.to_index()

sb = next(s for s in select_sleeping_beauties(index) if s.id == truth.sb_id)
triad = extract_triad(index, sb)
print("prince:", triad.pr_id, "co-cited", triad.prince.co_citation_count, "times")
print("window:", triad.window.start, "-", triad.window.end)
print("storytellers:", ", ".join(triad.storytellers))

# window citers split three ways; the overlap is exactly the Storytellers
groups = partition_groups(index, triad)
print({k: len(v) for k, v in vars(groups).items()})

# yearly history, as it would be drawn as a bar chart
sb_hist = yearly_citation_series(index, triad.sb_id, index.y_max)
pr_hist = yearly_citation_series(index, triad.pr_id, index.y_max)
pr_by_year = dict(zip(range(pr_hist.pub_year, index.y_max + 1), pr_hist.counts.tolist()))
for age, c in enumerate(sb_hist.counts.tolist()):
    year = sb_hist.pub_year + age
    if year >= triad.window.start:
        print(year, "SB", "#" * min(c, 60), "| PR", pr_by_year.get(year, 0))
