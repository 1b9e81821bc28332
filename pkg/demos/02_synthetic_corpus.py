"""
Synthetic corpora with a planted Sleeping Beauty
================================================

The generator grows a citation graph year by year. Each new paper cites
earlier ones with probability proportional to (citations so far + offset),
damped by age. On top of that background we plant a paper that sleeps for
twenty years, its Prince, a handful of Storytellers, and a burst.
"""

from dormancy import select_sleeping_beauties
from dormancy.synth import SynthConfig, TriadSpec, baseline_rate, generate_ca_corpus, plant_triad

cfg = SynthConfig(n_papers=10_000, refs_per_paper=5, seed=1)
corpus = generate_ca_corpus(cfg)
print(f"{len(corpus.papers)} papers, {corpus.citing.size} citations")
print(f"baseline: {baseline_rate(corpus):.3f} citations per paper-year")

truth = plant_triad(corpus, TriadSpec(sleep_years=20, burst_size=50, n_st=6))
print("planted:", truth.sb_id, "published", truth.sb_year, "awakens", truth.awakening_year)

index = corpus.to_index()
sbs = select_sleeping_beauties(index)
print(f"{len(sbs)} papers pass both percentile filters")
for sb in sbs:
    flag = "  <- planted" if sb.id == truth.sb_id else ""
    print(f"  {sb.id:12s} B={sb.b:8.1f} awakening={sb.awakening_year}{flag}")
