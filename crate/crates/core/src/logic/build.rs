//! Derived formulas over the builtin order: minimum, maximum, successor,
//! and their lifts to tuples. Auxiliary bound variables are drawn from a
//! [`Fresh`] supply so they never clash with the caller's names.

use super::ast::Formula;
use super::subst::Fresh;

/// `x` is the least element.
pub fn bot(x: &str, fresh: &mut Fresh) -> Formula {
    let z = fresh.name("z");
    Formula::not(Formula::exists(&z, Formula::less(&z, x)))
}

/// `x` is the greatest element.
pub fn top(x: &str, fresh: &mut Fresh) -> Formula {
    let z = fresh.name("z");
    Formula::not(Formula::exists(&z, Formula::less(x, &z)))
}

/// `y` is the immediate successor of `x`.
pub fn succ(x: &str, y: &str, fresh: &mut Fresh) -> Formula {
    let z = fresh.name("z");
    Formula::and(
        Formula::less(x, y),
        Formula::not(Formula::exists(&z, Formula::and(Formula::less(x, &z), Formula::less(&z, y)))),
    )
}

pub fn tuple_eq(xs: &[String], ys: &[String]) -> Formula {
    Formula::big_and(xs.iter().zip(ys).map(|(x, y)| Formula::eq(x, y)))
}

/// Every component of `xs` is the least element.
pub fn tuple_bot(xs: &[String], fresh: &mut Fresh) -> Formula {
    Formula::big_and(xs.iter().map(|x| bot(x, fresh)).collect::<Vec<_>>())
}

/// Every component of `xs` is the greatest element.
pub fn tuple_top(xs: &[String], fresh: &mut Fresh) -> Formula {
    Formula::big_and(xs.iter().map(|x| top(x, fresh)).collect::<Vec<_>>())
}

/// `ys` is the lexicographic successor of `xs`; the last coordinate is least
/// significant.
pub fn tuple_succ(xs: &[String], ys: &[String], fresh: &mut Fresh) -> Formula {
    let k = xs.len();
    let mut cases = Vec::new();
    for i in 0..k {
        // prefix before i equal, position i steps up, suffix wraps from top to bottom
        let mut parts = vec![tuple_eq(&xs[..i], &ys[..i]), succ(&xs[i], &ys[i], fresh)];
        for j in i + 1..k {
            parts.push(top(&xs[j], fresh));
            parts.push(bot(&ys[j], fresh));
        }
        cases.push(Formula::big_and(parts));
    }
    Formula::big_or(cases)
}

/// `xs` precedes `ys` lexicographically.
pub fn tuple_less(xs: &[String], ys: &[String]) -> Formula {
    let k = xs.len();
    Formula::big_or((0..k).map(|i| Formula::and(tuple_eq(&xs[..i], &ys[..i]), Formula::less(&xs[i], &ys[i]))))
}
