# %% [markdown]
# # The p-adic value at Delta x E4, p = 11
#
# The space is M_12(Gamma_0(11)) in a packaged exact basis.  U_11 acts by an
# exact 12 x 12 matrix; its ordinary part is cut out by the projector.

# %%
from rankinpadic import datasets, suites
from rankinpadic.padicL import (Budgets, dual_padic_L_at, fe_report, newton_unit_root_count,
                                ordinary_projector, padic_L_at, projector_checks)

space = datasets.space_12_11()
point = suites.genuine_point()
point.describe()

# %%
e = ordinary_projector(space.up, 11, 30)
chk = projector_checks(e, space.up, [("T_2", space.hecke(2))])
chk["idempotent"], chk["commutes_T_2"], chk["trace"], newton_unit_root_count(space.up, 11)

# %%
L, prov = padic_L_at(point, space, Budgets(), with_provenance=True)
L, prov

# %%
# Doubling both budgets reproduces every reported digit.
L2 = padic_L_at(point, space, Budgets().doubled())
(L2 - L).is_zero(), L.prec, L2.prec

# %%
# The functional equation at level one, with the (1 + p) control.
Ld = dual_padic_L_at(point, space, Budgets())
rep = fe_report(point, L, Ld, 1, tamper=12)
rep["zero"], rep["precision"], rep["tamper"]["detected"]
