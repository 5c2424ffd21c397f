"""
Truncated Pareto QQ-plot
========================

With the odds estimate plugged in, the top of a truncated sample lines up
again. The anchor k* is the top count giving the most linear plot.
"""
from tailtrunc import (BurrModel, TruncatedModel, pareto_qq, sample, select_k_star, tpa_qq,
                       tpa_qq_auto)
from tailtrunc.qq import top_correlation

x = sample(TruncatedModel.at_level(BurrModel(2.0, -1.0), 0.95), 500, seed=3)

plain = pareto_qq(x)
auto = tpa_qq_auto(x)
print(f"k* = {auto.k_star}, odds used = {auto.d_used:.4f}, |corr| = {abs(auto.correlation):.5f}")
print(f"plain Pareto plot over the same top points: |corr| = "
      f"{abs(top_correlation(plain.x, plain.y, auto.k_star)):.5f}")

# a stride speeds up the anchor search on long samples
k, c = select_k_star(x, k_min=11, stride=5)
print(f"stride 5: k* = {k}, corr = {c:.5f}")

# d = 0 gives back the ordinary Pareto QQ-plot
same = tpa_qq(x, 0.0)
print("d = 0 equals the Pareto plot:", (same.x == plain.x).all() and (same.y == plain.y).all())

# the first lines of the CSV the `qq` subcommand writes
print("\n".join(auto.to_csv().splitlines()[:5]))
