//! Weighted finite automata and their JSON form.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::SchemaError;
use crate::semiring::{Boolean, Semiring, SemiringKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wfa<K> {
    alphabet: BTreeSet<char>,
    /// id -> (input weight, output weight)
    states: BTreeMap<usize, (K, K)>,
    delta: BTreeMap<(usize, char, usize), K>,
}

impl<K: Semiring> Wfa<K> {
    pub fn new(alphabet: BTreeSet<char>) -> Self {
        Wfa {
            alphabet,
            states: BTreeMap::new(),
            delta: BTreeMap::new(),
        }
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn add_state(&mut self, id: usize, initial: K, fin: K) {
        self.states.insert(id, (initial, fin));
    }

    pub fn set_initial(&mut self, id: usize, k: K) {
        self.states.entry(id).or_insert_with(|| (K::zero(), K::zero())).0 = k;
    }

    pub fn set_final(&mut self, id: usize, k: K) {
        self.states.entry(id).or_insert_with(|| (K::zero(), K::zero())).1 = k;
    }

    /// Sets `δ(p, a, q)`; `0̄` removes the transition.
    pub fn set_transition(&mut self, p: usize, a: char, q: usize, k: K) {
        for s in [p, q] {
            self.states.entry(s).or_insert_with(|| (K::zero(), K::zero()));
        }
        self.alphabet.insert(a);
        if k.is_zero() {
            self.delta.remove(&(p, a, q));
        } else {
            self.delta.insert((p, a, q), k);
        }
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        self.states.keys().copied()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self, q: usize) -> K {
        self.states.get(&q).map_or_else(K::zero, |s| s.0.clone())
    }

    pub fn final_weight(&self, q: usize) -> K {
        self.states.get(&q).map_or_else(K::zero, |s| s.1.clone())
    }

    pub fn weight(&self, p: usize, a: char, q: usize) -> K {
        self.delta.get(&(p, a, q)).cloned().unwrap_or_else(K::zero)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&(usize, char, usize), &K)> + '_ {
        self.delta.iter()
    }

    pub fn transition_count(&self) -> usize {
        self.delta.len()
    }

    /// The weight-erased automaton.
    pub fn cast(&self) -> Wfa<Boolean> {
        let b = |k: &K| Boolean(!k.is_zero());
        Wfa {
            alphabet: self.alphabet.clone(),
            states: self.states.iter().map(|(q, (i, f))| (*q, (b(i), b(f)))).collect(),
            delta: self.delta.keys().map(|t| (*t, Boolean(true))).collect(),
        }
    }

    /// Sum over all runs labelled by `word`.
    pub fn coefficient(&self, word: &[char]) -> K {
        let mut v: BTreeMap<usize, K> = self
            .states
            .iter()
            .filter(|(_, (i, _))| !i.is_zero())
            .map(|(q, (i, _))| (*q, i.clone()))
            .collect();
        for &a in word {
            let mut next: BTreeMap<usize, K> = BTreeMap::new();
            for (&(p, b, q), k) in &self.delta {
                if b != a {
                    continue;
                }
                if let Some(x) = v.get(&p) {
                    let w = x.mul(k);
                    let e = next.entry(q).or_insert_with(K::zero);
                    *e = e.add(&w);
                }
            }
            next.retain(|_, k| !k.is_zero());
            if next.is_empty() {
                return K::zero();
            }
            v = next;
        }
        v.iter()
            .fold(K::zero(), |acc, (q, x)| acc.add(&x.mul(&self.final_weight(*q))))
    }

    pub fn to_json(&self) -> String {
        let doc = WfaDoc {
            semiring: K::KIND.name(),
            alphabet: self.alphabet.iter().map(|c| c.to_string()).collect(),
            states: self
                .states
                .iter()
                .map(|(q, (i, f))| StateDoc {
                    id: *q,
                    initial: (!i.is_zero()).then(|| i.to_string()),
                    r#final: (!f.is_zero()).then(|| f.to_string()),
                })
                .collect(),
            transitions: self
                .delta
                .iter()
                .map(|(&(p, a, q), k)| TransitionDoc {
                    from: p,
                    label: a.to_string(),
                    to: q,
                    weight: k.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
        let kind = document_kind_of(&root)?;
        if kind != K::KIND {
            return Err(SchemaError::new(
                "/semiring",
                format!("expected `{}`, found `{}`", K::KIND, kind),
            ));
        }
        read_document(&root)
    }
}

#[derive(Serialize)]
struct WfaDoc {
    semiring: &'static str,
    alphabet: Vec<String>,
    states: Vec<StateDoc>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize)]
struct StateDoc {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r#final: Option<String>,
}

#[derive(Serialize)]
struct TransitionDoc {
    from: usize,
    label: String,
    to: usize,
    weight: String,
}

/// Reads only the `semiring` field of a WFA document.
pub fn document_kind(text: &str) -> Result<SemiringKind, SchemaError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    document_kind_of(&root)
}

fn document_kind_of(root: &Value) -> Result<SemiringKind, SchemaError> {
    let obj = root
        .as_object()
        .ok_or_else(|| SchemaError::new("", "expected an object"))?;
    let s = obj
        .get("semiring")
        .ok_or_else(|| SchemaError::new("/semiring", "missing field"))?
        .as_str()
        .ok_or_else(|| SchemaError::new("/semiring", "expected a string"))?;
    s.parse()
        .map_err(|e: crate::error::SemiringError| SchemaError::new("/semiring", e.to_string()))
}

fn check_fields(obj: &Map<String, Value>, at: &str, allowed: &[&str]) -> Result<(), SchemaError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(SchemaError::new(format!("{at}/{key}"), "unknown field"));
        }
    }
    Ok(())
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    v.as_object().ok_or_else(|| SchemaError::new(at, "expected an object"))
}

fn array<'a>(obj: &'a Map<String, Value>, at: &str, key: &str) -> Result<&'a [Value], SchemaError> {
    match obj.get(key) {
        None => Ok(&[]),
        Some(v) => v
            .as_array()
            .map(Vec::as_slice)
            .ok_or_else(|| SchemaError::new(format!("{at}/{key}"), "expected an array")),
    }
}

fn id(obj: &Map<String, Value>, at: &str, key: &str) -> Result<usize, SchemaError> {
    let p = format!("{at}/{key}");
    let v = obj.get(key).ok_or_else(|| SchemaError::new(&p, "missing field"))?;
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| SchemaError::new(p, "expected a non-negative integer"))
}

fn symbol(v: Option<&Value>, at: &str) -> Result<char, SchemaError> {
    let v = v.ok_or_else(|| SchemaError::new(at, "missing field"))?;
    let s = v.as_str().ok_or_else(|| SchemaError::new(at, "expected a string"))?;
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) if !c.is_whitespace() => Ok(c),
        _ => Err(SchemaError::new(at, "expected a single symbol")),
    }
}

fn weight<K: Semiring>(obj: &Map<String, Value>, at: &str, key: &str) -> Result<K, SchemaError> {
    let p = format!("{at}/{key}");
    match obj.get(key) {
        None => Ok(K::zero()),
        Some(Value::String(s)) => K::parse(s).map_err(|e| SchemaError::new(p, e.to_string())),
        Some(_) => Err(SchemaError::new(p, "expected a weight string")),
    }
}

fn read_document<K: Semiring>(root: &Value) -> Result<Wfa<K>, SchemaError> {
    let obj = object(root, "")?;
    check_fields(obj, "", &["semiring", "alphabet", "states", "transitions"])?;

    let mut alphabet = BTreeSet::new();
    for (i, v) in array(obj, "", "alphabet")?.iter().enumerate() {
        let at = format!("/alphabet/{i}");
        if !alphabet.insert(symbol(Some(v), &at)?) {
            return Err(SchemaError::new(at, "duplicate symbol"));
        }
    }
    let mut m = Wfa::new(alphabet);

    if !obj.contains_key("states") {
        return Err(SchemaError::new("/states", "missing field"));
    }
    for (i, v) in array(obj, "", "states")?.iter().enumerate() {
        let at = format!("/states/{i}");
        let s = object(v, &at)?;
        check_fields(s, &at, &["id", "initial", "final"])?;
        let q = id(s, &at, "id")?;
        if m.states.contains_key(&q) {
            return Err(SchemaError::new(format!("{at}/id"), format!("duplicate state {q}")));
        }
        let init = weight(s, &at, "initial")?;
        let fin = weight(s, &at, "final")?;
        m.add_state(q, init, fin);
    }

    let mut seen = BTreeSet::new();
    for (i, v) in array(obj, "", "transitions")?.iter().enumerate() {
        let at = format!("/transitions/{i}");
        let t = object(v, &at)?;
        check_fields(t, &at, &["from", "label", "to", "weight"])?;
        let p = id(t, &at, "from")?;
        let q = id(t, &at, "to")?;
        for (key, s) in [("from", p), ("to", q)] {
            if !m.states.contains_key(&s) {
                return Err(SchemaError::new(format!("{at}/{key}"), format!("undeclared state {s}")));
            }
        }
        let a = symbol(t.get("label"), &format!("{at}/label"))?;
        if !m.alphabet.contains(&a) {
            return Err(SchemaError::new(
                format!("{at}/label"),
                format!("symbol `{a}` not in the alphabet"),
            ));
        }
        if !seen.insert((p, a, q)) {
            return Err(SchemaError::new(at, format!("duplicate transition ({p}, {a}, {q})")));
        }
        let k = weight(t, &at, "weight")?;
        m.set_transition(p, a, q, k);
    }
    Ok(m)
}
