# %% [markdown]
# # Kato Eisenstein series
#
# Symbols F^{(m)}_{a,b} | B_Q render to exact q-expansions over a cyclotomic
# field. The depleted family F~ is a short combination of them.

# %%
from fractions import Fraction

from rankinpadic.coefficients import DirichletCharacter
from rankinpadic.eisenstein import (KatoEisSymbol, decomposition, distribution_sides, eis_F_tilde,
                                    kato_q_expansion)

sym = KatoEisSymbol(3, Fraction(1, 3), Fraction(1, 4), 3)
F = kato_q_expansion(sym, 12)
[str(F[n]) for n in range(6)]

# %%
# The decomposition of F~ for each character mod 5, at m = 3 and N = 4.
p, N, m = 5, 4, 3
for chi in DirichletCharacter.all_mod(p):
    comb = decomposition(m, chi, N, p)
    same = kato_q_expansion(comb, 60) == eis_F_tilde(m, chi, N, p, 60)
    print(f"order {chi.order}, parity {chi.parity():+d}: {len(comb)} symbols, agrees: {same}")

# %%
# The distribution relation, compared coefficient by coefficient.
lhs, rhs = distribution_sides(m, N, p)
print(kato_q_expansion(lhs, 200) == kato_q_expansion(rhs, 200))
