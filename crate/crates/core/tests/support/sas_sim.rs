//! Reader and successor generator for translator-format SAS+ tasks.

use std::collections::HashMap;

#[derive(Debug)]
pub struct Operator {
    pub name: String,
    pub prevail: Vec<(usize, u32)>,
    /// (variable, precondition or -1, postcondition)
    pub effects: Vec<(usize, i64, u32)>,
    pub cost: u32,
}

#[derive(Debug)]
pub struct Task {
    pub version: u32,
    /// Atom names per variable.
    pub domains: Vec<Vec<String>>,
    pub init: Vec<u32>,
    pub goal: Vec<(usize, u32)>,
    pub operators: Vec<Operator>,
    /// Operators indexed by each variable's precondition value.
    by_var_value: HashMap<(usize, u32), Vec<usize>>,
}

struct Lines<'a> {
    it: std::str::Lines<'a>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> &'a str {
        self.it.next().expect("unexpected end of SAS+ text").trim()
    }

    fn expect(&mut self, s: &str) {
        let l = self.next();
        assert_eq!(l, s);
    }

    fn num<T: std::str::FromStr>(&mut self) -> T
    where
        T::Err: std::fmt::Debug,
    {
        self.next().parse().expect("number")
    }

    fn nums(&mut self) -> Vec<i64> {
        self.next().split_whitespace().map(|t| t.parse().unwrap()).collect()
    }
}

pub fn load(text: &str) -> Task {
    let mut l = Lines { it: text.lines() };
    l.expect("begin_version");
    let version = l.num();
    l.expect("end_version");
    l.expect("begin_metric");
    let _metric: u32 = l.num();
    l.expect("end_metric");
    let nvars: usize = l.num();
    let mut domains = Vec::with_capacity(nvars);
    for _ in 0..nvars {
        l.expect("begin_variable");
        let _name = l.next();
        let layer: i64 = l.num();
        assert_eq!(layer, -1);
        let size: usize = l.num();
        domains.push((0..size).map(|_| l.next().to_string()).collect());
        l.expect("end_variable");
    }
    let mutexes: usize = l.num();
    assert_eq!(mutexes, 0);
    l.expect("begin_state");
    let init = (0..nvars).map(|_| l.num()).collect();
    l.expect("end_state");
    l.expect("begin_goal");
    let ng: usize = l.num();
    let goal = (0..ng)
        .map(|_| {
            let v = l.nums();
            (v[0] as usize, v[1] as u32)
        })
        .collect();
    l.expect("end_goal");
    let nops: usize = l.num();
    let mut operators = Vec::with_capacity(nops);
    for _ in 0..nops {
        l.expect("begin_operator");
        let name = l.next().to_string();
        let np: usize = l.num();
        let prevail = (0..np)
            .map(|_| {
                let v = l.nums();
                (v[0] as usize, v[1] as u32)
            })
            .collect();
        let ne: usize = l.num();
        let effects = (0..ne)
            .map(|_| {
                let v = l.nums();
                assert_eq!(v[0], 0, "no conditional effects");
                (v[1] as usize, v[2], v[3] as u32)
            })
            .collect();
        let cost = l.num();
        l.expect("end_operator");
        operators.push(Operator {
            name,
            prevail,
            effects,
            cost,
        });
    }
    let axioms: usize = l.num();
    assert_eq!(axioms, 0);
    let mut by_var_value: HashMap<(usize, u32), Vec<usize>> = HashMap::new();
    for (i, op) in operators.iter().enumerate() {
        // every exported operator moves the agent with a known origin
        let &(v, pre, _) = op.effects.iter().find(|e| e.1 >= 0).expect("effect with precondition");
        by_var_value.entry((v, pre as u32)).or_default().push(i);
    }
    Task {
        version,
        domains,
        init,
        goal,
        operators,
        by_var_value,
    }
}

impl Task {
    pub fn applicable(&self, state: &[u32], op: &Operator) -> bool {
        op.prevail.iter().all(|&(v, x)| state[v] == x)
            && op.effects.iter().all(|&(v, pre, _)| pre < 0 || state[v] == pre as u32)
    }

    pub fn apply(&self, state: &[u32], op: &Operator) -> Vec<u32> {
        let mut next = state.to_vec();
        for &(v, _, post) in &op.effects {
            next[v] = post;
        }
        next
    }

    pub fn successors(&self, state: &[u32]) -> Vec<(usize, Vec<u32>)> {
        let mut out = Vec::new();
        for (v, &x) in state.iter().enumerate() {
            for &i in self.by_var_value.get(&(v, x)).map(Vec::as_slice).unwrap_or(&[]) {
                let op = &self.operators[i];
                if self.applicable(state, op) {
                    out.push((i, self.apply(state, op)));
                }
            }
        }
        out
    }

    pub fn is_goal(&self, state: &[u32]) -> bool {
        self.goal.iter().all(|&(v, x)| state[v] == x)
    }
}
