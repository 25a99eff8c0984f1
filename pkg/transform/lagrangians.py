"""Field strengths and Lagrangian densities of the volume-preserving gauge theory"""
from symbolic import Expression, canonicalize, make_atom, parse
from symbolic.calculus import apply_divergence_constraint
from symbolic.indices import Index, IndexKind, fresh_label

_FIELD_STRENGTH = (
    "d[.{mu}](A[.{nu},{al}]) - d[.{nu}](A[.{mu},{al}])"
    " + {k}A[.{mu},{x}]*nab[.{x}](A[.{nu},{al}]) - {k}A[.{nu},{x}]*nab[.{x}](A[.{mu},{al}])"
)


def field_strength(mu: str = "mu", nu: str = "nu", al: str = "al", rescaled: bool = False) -> Expression:
    """F_{μν}^α; the rescaled form carries 1/N on the inner derivative terms"""
    k = "N^-1*" if rescaled else ""
    x = fresh_label(IndexKind.INNER, (mu, nu, al))
    return parse(_FIELD_STRENGTH.format(mu=mu, nu=nu, al=al, k=k, x=x))


def gauge_lagrangian(metric: bool = False, rescaled: bool = False, coefficient="-1/4") -> Expression:
    """coefficient · F_{μν}^α F^{μν}_α, contracted through g when metric is set"""
    first = field_strength("mu", "nu", "al", rescaled)
    if metric:
        second = field_strength("mu", "nu", "be", rescaled)
        g = Expression.of(make_atom("g", (Index.inner("al", True), Index.inner("be", True))))
        product = first * second * g
    else:
        product = first * field_strength("mu", "nu", "al", rescaled)
    return canonicalize(product * parse(coefficient))


def gauge_fixing_function(al: str = "al") -> Expression:
    """f^α = ∂^μ A_μ^α"""
    return parse(f"d[mu](A[.mu,{al}])")


def ghost_lagrangian() -> Expression:
    return parse(
        "-d[mu](ws[.al])*d[.mu](w[al])"
        " - d[mu](ws[.al])*A[.mu,be]*nab[.be](w[al])"
        " + d[mu](ws[.al])*w[be]*nab[.be](A[.mu,al])"
    )


def l_mod(gauge_parameter: str = "xi") -> Expression:
    """Gauge-fixed Lagrangian with the Faddeev-Popov ghost terms"""
    fixing = parse(f"-1/2*{gauge_parameter}^-1*d[mu](A[.mu,al])*d[nu](A[.nu,al])")
    return apply_divergence_constraint(canonicalize(gauge_lagrangian() + fixing + ghost_lagrangian()))


def l_new(metric: bool = False, gauge_parameter: str = "xi") -> Expression:
    """Lagrangian with the Nakanishi-Lautrup field h"""
    nl = parse(f"h[.al]*d[mu](A[.mu,al]) + 1/2*{gauge_parameter}*h[.al]*h[al]")
    return apply_divergence_constraint(canonicalize(gauge_lagrangian(metric) + ghost_lagrangian() + nl))


def matter_lagrangian(rescaled: bool = False, wave: str = "Zpsi", mass: str = "m") -> Expression:
    """-Z_ψ ψ̄ γ^μ D_μ ψ − m ψ̄ψ"""
    k = "N^-1*" if rescaled else ""
    return parse(
        f"-{wave}*psibar*gam[mu]*d[.mu](psi)"
        f" - {wave}*{k}psibar*gam[mu]*A[.mu,be]*nab[.be](psi)"
        f" - {mass}*psibar*psi"
    )
