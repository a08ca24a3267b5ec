// Helpers for picking apart s-expression forms. Callers map the `String`
// detail into their own error types.

use crate::scalar::Scalar;
use crate::sexpr::SExpr;

pub(crate) fn symbol(e: &SExpr) -> Result<&str, String> {
    e.as_symbol().ok_or_else(|| format!("expected a symbol, found `{e}`"))
}

pub(crate) fn list(e: &SExpr) -> Result<&[SExpr], String> {
    e.as_list().ok_or_else(|| format!("expected a list, found `{e}`"))
}

pub(crate) fn number<T: Scalar>(e: &SExpr) -> Result<T, String> {
    if !e.is_number() {
        return Err(format!("expected a number, found `{e}`"));
    }
    T::from_sexpr(e).ok_or_else(|| format!("number `{e}` is not representable exactly"))
}

pub(crate) fn is_var(name: &str) -> bool {
    name.len() > 1 && name.starts_with('?')
}

/// Splits `:a x y :b z` into `[("a", [x, y]), ("b", [z])]`. Items before
/// the first keyword are returned under the empty name.
pub(crate) fn keyword_sections(items: &[SExpr]) -> Vec<(&str, &[SExpr])> {
    let mut out = Vec::new();
    let mut name = "";
    let mut start = 0;
    for (i, item) in items.iter().enumerate() {
        if let Some(k) = item.as_keyword() {
            if i > start || !name.is_empty() {
                out.push((name, &items[start..i]));
            }
            name = k;
            start = i + 1;
        }
    }
    if items.len() > start || !name.is_empty() {
        out.push((name, &items[start..]));
    }
    out
}

/// Parses a PDDL-style typed list `a b - t1 c - t2 d`; untyped names get
/// `None`.
pub(crate) fn typed_list(items: &[SExpr]) -> Result<Vec<(String, Option<String>)>, String> {
    let mut out: Vec<(String, Option<String>)> = Vec::new();
    let mut pending = 0usize;
    let mut i = 0;
    while i < items.len() {
        let name = symbol(&items[i])?;
        if name == "-" {
            let ty = items.get(i + 1).ok_or("type expected after `-`")?;
            let ty = symbol(ty)?;
            if pending == 0 {
                return Err(format!("type `{ty}` does not follow any name"));
            }
            let n = out.len();
            for entry in &mut out[n - pending..] {
                entry.1 = Some(ty.to_string());
            }
            pending = 0;
            i += 2;
        } else {
            out.push((name.to_string(), None));
            pending += 1;
            i += 1;
        }
    }
    Ok(out)
}

/// Inverse of [`typed_list`]: groups runs of equal types.
pub(crate) fn write_typed_list(entries: &[(String, Option<String>)]) -> Vec<SExpr> {
    let mut out = Vec::new();
    for (i, (name, ty)) in entries.iter().enumerate() {
        out.push(SExpr::sym(name.clone()));
        let next_ty = entries.get(i + 1).map(|e| &e.1);
        if let Some(ty) = ty {
            if next_ty != Some(&Some(ty.clone())) {
                out.push(SExpr::sym("-"));
                out.push(SExpr::sym(ty.clone()));
            }
        }
    }
    out
}
