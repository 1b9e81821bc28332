"""
Beauty Coefficient and awakening time
=====================================

A paper that sits uncited for years and then takes off has a citation
curve that runs far below the straight line joining its first year to its
peak year. The Beauty Coefficient adds up that gap, year by year.
"""

import numpy as np

from dormancy import CitationSeries, awakening_time, beauty, beauty_coefficient

# a steady climber lies on its own reference line, so B is zero
print(beauty_coefficient([2, 4, 6, 8, 10]))

# four silent years then a jump: B = 15, and the awakening is the year
# right before the jump, where the curve is furthest from the line
print(beauty_coefficient([0, 0, 0, 0, 10]), awakening_time([0, 0, 0, 0, 10]))

# a long sleep with a little noise
rng = np.random.default_rng(3)
series = np.concatenate([rng.poisson(0.3, 25), [4, 12, 30, 41, 55]])
res = beauty(CitationSeries(pub_year=1985, counts=series))
print(f"B={res.b:.1f}  peak at t={res.t_m}  awakens in {res.awakening_year}")

# B grows with both the length of the sleep and the height of the peak
for sleep in (5, 10, 20):
    s = [0] * sleep + [20]
    print(sleep, beauty_coefficient(s)[0])
