#![allow(dead_code)]

use kglushkov::{Tropical, Wfa};

pub fn t(n: u64) -> Tropical {
    Tropical::finite(n)
}

/// Tropical WFA with one maximal orbit {1..7}, entered from 8 and 9 and
/// left towards 10, 11 and 12. Inputs are 2, 4, 6 and outputs 5, 7.
///
/// M_e = [[4,2,2],[5,3,3]], M_s = [[1,2,3],[3,4,5]], M_O = [[2,0,0],[4,2,2]].
/// `back` overrides the weight of the back edge 5 -> 2.
pub fn orbit_example(back: u64) -> Wfa<Tropical> {
    let letters = [(1, 'a'), (2, 'b'), (3, 'c'), (4, 'a'), (5, 'b'), (6, 'b'), (7, 'c'), (8, 'd'), (9, 'e'), (10, 'f'), (11, 'g'), (12, 'h')];
    let letter = |q: usize| letters.iter().find(|(v, _)| *v == q).unwrap().1;
    let mut m = Wfa::new(letters.iter().map(|(_, c)| *c).collect());
    m.add_state(0, t(0), Tropical::INFINITY);
    for (q, _) in letters {
        let fin = if q >= 10 { t(0) } else { Tropical::INFINITY };
        m.add_state(q, Tropical::INFINITY, fin);
    }
    let edges: Vec<(usize, usize, u64)> = vec![
        (0, 8, 0),
        (0, 9, 0),
        // M_e
        (8, 2, 4), (8, 4, 2), (8, 6, 2),
        (9, 2, 5), (9, 4, 3), (9, 6, 3),
        // interior
        (2, 1, 0), (4, 3, 0),
        (1, 5, 0), (1, 7, 2), (3, 5, 0), (3, 7, 2), (6, 5, 0), (6, 7, 2),
        // M_O
        (5, 2, back), (5, 4, 0), (5, 6, 0),
        (7, 2, 4), (7, 4, 2), (7, 6, 2),
        // M_s
        (5, 10, 1), (5, 11, 2), (5, 12, 3),
        (7, 10, 3), (7, 11, 4), (7, 12, 5),
    ];
    for (p, q, w) in edges {
        m.set_transition(p, letter(q), q, t(w));
    }
    m
}
