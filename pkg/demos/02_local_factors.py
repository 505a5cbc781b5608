# %% [markdown]
# # Local factors at p and at the bad primes
#
# Random admissible crystalline data, the modified Euler factor, and tame
# gamma factors of Weil-Deligne data.

# %%
import random
from fractions import Fraction

from rankinpadic.localfactors import (crys_identities, modified_factor, modified_factor_ratio, random_crys_data,
                                      random_wd_datum, tame_gamma)

rng = random.Random(7)
d = random_crys_data(rng, 5)
d, d.beta

# %%
ids = crys_identities(d)
{name: rec["ok"] for name, rec in ids.items()}

# %%
# Both expressions for the modified factor.
modified_factor(d), modified_factor(d) == modified_factor_ratio(d)

# %%
# A tame datum at nu = 7.  Twisting by an unramified character rescales X.
rep = random_wd_datum(rng, 7)
g = tame_gamma(rep)
x = Fraction(3, 2)
print(g)
print(tame_gamma(rep.twist(x)) == g.subs_scale(x))
