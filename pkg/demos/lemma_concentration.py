"""
Concentration of the certificate's ingredients
==============================================

Monte-Carlo failure counts for the concentration estimates behind the
recovery guarantee, at a few cluster sizes.
"""

from sdpkmeans.bench import lemma_check

for lemma in ("4.1", "4.3", "4.8"):
    for n in (50, 200, 800):
        r = lemma_check(lemma, m=6, delta=3.0, n=n, eps=0.1, trials=40)
        print("lemma %s  n=%4d  failures %2d/40  worst margin %.3g" % (lemma, n, r.failures, r.worst_margin))

# min(M^(a,b) 1)/n drifts toward delta(delta - 2) = 3 slowly: the minimum over
# a ball only reaches the boundary at a polynomial rate in n
for n in (50, 200, 800):
    r = lemma_check("4.5", m=6, delta=3.0, n=n, trials=40)
    print("n=%4d  mean min(M1)/n = %.3f" % (n, r.mean_quantity))
