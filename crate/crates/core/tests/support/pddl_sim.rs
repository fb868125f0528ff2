//! A small PDDL interpreter: s-expression reader, lifted schema matching
//! by backtracking over facts, and STRIPS successor generation.

use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn list(&self) -> &[Sexp] {
        match self {
            Sexp::List(v) => v,
            Sexp::Atom(a) => panic!("expected list, found {a}"),
        }
    }

    fn atom(&self) -> &str {
        match self {
            Sexp::Atom(a) => a,
            Sexp::List(_) => panic!("expected atom"),
        }
    }
}

pub fn parse(text: &str) -> Vec<Sexp> {
    let cleaned: String = text
        .lines()
        .map(|l| l.split(';').next().unwrap())
        .collect::<Vec<_>>()
        .join("\n");
    let spaced = cleaned.replace('(', " ( ").replace(')', " ) ");
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for tok in spaced.split_whitespace() {
        match tok {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack.pop().expect("balanced");
                stack.last_mut().expect("balanced").push(Sexp::List(done));
            }
            t => stack.last_mut().unwrap().push(Sexp::Atom(t.to_lowercase())),
        }
    }
    assert_eq!(stack.len(), 1, "unbalanced parentheses");
    stack.pop().unwrap()
}

pub type Fact = Vec<String>;

#[derive(Debug, Clone)]
struct Literal {
    negated: bool,
    pred: String,
    args: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Schema {
    pub name: String,
    params: Vec<String>,
    pre: Vec<Literal>,
    add: Vec<Literal>,
    del: Vec<Literal>,
}

#[derive(Debug)]
pub struct Task {
    pub schemas: Vec<Schema>,
    pub statics: HashMap<(String, String), Vec<Fact>>,
    static_preds: BTreeSet<String>,
    pub init: BTreeSet<Fact>,
    pub goal: Vec<Fact>,
}

fn literal(e: &Sexp) -> Literal {
    let l = e.list();
    if l[0].atom() == "not" {
        let inner = literal(&l[1]);
        return Literal {
            negated: true,
            ..inner
        };
    }
    Literal {
        negated: false,
        pred: l[0].atom().to_string(),
        args: l[1..].iter().map(|a| a.atom().to_string()).collect(),
    }
}

fn conjunction(e: &Sexp) -> Vec<Literal> {
    let l = e.list();
    if l.first().map(|a| a == &Sexp::Atom("and".into())).unwrap_or(false) {
        l[1..].iter().map(literal).collect()
    } else {
        vec![literal(e)]
    }
}

fn fact(e: &Sexp) -> Fact {
    e.list().iter().map(|a| a.atom().to_string()).collect()
}

fn section<'a>(body: &'a [Sexp], key: &str) -> Option<&'a Sexp> {
    body.iter().find(|e| matches!(e, Sexp::List(l) if l.first() == Some(&Sexp::Atom(key.into()))))
}

pub fn load(domain: &str, problem: &str) -> Task {
    let d = parse(domain);
    let d = d[0].list();
    let mut schemas = Vec::new();
    for e in d {
        let Sexp::List(l) = e else { continue };
        if l.first() != Some(&Sexp::Atom(":action".into())) {
            continue;
        }
        let name = l[1].atom().to_string();
        let mut params = Vec::new();
        let mut pre = Vec::new();
        let mut eff = Vec::new();
        let mut i = 2;
        while i < l.len() {
            match l[i].atom() {
                ":parameters" => {
                    params = l[i + 1]
                        .list()
                        .iter()
                        .map(|a| a.atom().to_string())
                        .filter(|a| a.starts_with('?'))
                        .collect()
                }
                ":precondition" => pre = conjunction(&l[i + 1]),
                ":effect" => eff = conjunction(&l[i + 1]),
                other => panic!("unexpected key {other}"),
            }
            i += 2;
        }
        let (del, add): (Vec<_>, Vec<_>) = eff.into_iter().partition(|l| l.negated);
        schemas.push(Schema {
            name,
            params,
            pre,
            add,
            del,
        });
    }
    let fluent: BTreeSet<String> = schemas
        .iter()
        .flat_map(|s| s.add.iter().chain(&s.del).map(|l| l.pred.clone()))
        .collect();

    let p = parse(problem);
    let p = p[0].list();
    let init_sec = section(p, ":init").expect("init");
    let goal_sec = section(p, ":goal").expect("goal");
    let mut statics: HashMap<(String, String), Vec<Fact>> = HashMap::new();
    let mut static_preds = BTreeSet::new();
    let mut init = BTreeSet::new();
    for e in &init_sec.list()[1..] {
        let f = fact(e);
        if fluent.contains(&f[0]) {
            init.insert(f);
        } else {
            static_preds.insert(f[0].clone());
            statics.entry((f[0].clone(), f[1].clone())).or_default().push(f);
        }
    }
    for s in &schemas {
        for l in &s.pre {
            if !fluent.contains(&l.pred) {
                static_preds.insert(l.pred.clone());
            }
        }
    }
    let goal = conjunction(&goal_sec.list()[1])
        .into_iter()
        .map(|l| {
            let mut f = vec![l.pred];
            f.extend(l.args);
            f
        })
        .collect();
    Task {
        schemas,
        statics,
        static_preds,
        init,
        goal,
    }
}

type Binding = HashMap<String, String>;

fn resolve(arg: &str, b: &Binding) -> Option<String> {
    if arg.starts_with('?') {
        b.get(arg).cloned()
    } else {
        Some(arg.to_string())
    }
}

fn ground(l: &Literal, b: &Binding) -> Fact {
    let mut f = vec![l.pred.clone()];
    f.extend(l.args.iter().map(|a| resolve(a, b).expect("bound")));
    f
}

impl Task {
    fn holds(&self, state: &BTreeSet<Fact>, f: &Fact) -> bool {
        if self.static_preds.contains(&f[0]) {
            self.statics
                .get(&(f[0].clone(), f[1].clone()))
                .is_some_and(|v| v.contains(f))
        } else {
            state.contains(f)
        }
    }

    fn candidates<'a>(&'a self, state: &'a BTreeSet<Fact>, l: &Literal, b: &Binding) -> Vec<&'a Fact> {
        let first = l.args.first().and_then(|a| resolve(a, b));
        if self.static_preds.contains(&l.pred) {
            match first {
                Some(f) => self
                    .statics
                    .get(&(l.pred.clone(), f))
                    .map(|v| v.iter().collect())
                    .unwrap_or_default(),
                None => self
                    .statics
                    .iter()
                    .filter(|((p, _), _)| p == &l.pred)
                    .flat_map(|(_, v)| v.iter())
                    .collect(),
            }
        } else {
            state.iter().filter(|f| f[0] == l.pred).collect()
        }
    }

    fn search(
        &self,
        state: &BTreeSet<Fact>,
        schema: &Schema,
        positives: &[&Literal],
        b: &mut Binding,
        out: &mut Vec<Binding>,
    ) {
        let Some((l, rest)) = positives.split_first() else {
            let ok = schema
                .pre
                .iter()
                .filter(|l| l.negated)
                .all(|l| !self.holds(state, &ground(l, b)));
            if ok && schema.params.iter().all(|p| b.contains_key(p)) {
                out.push(b.clone());
            }
            return;
        };
        for f in self.candidates(state, l, b) {
            if f.len() != l.args.len() + 1 {
                continue;
            }
            let mut added = Vec::new();
            let mut ok = true;
            for (a, v) in l.args.iter().zip(&f[1..]) {
                match resolve(a, b) {
                    Some(x) if &x == v => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        b.insert(a.clone(), v.clone());
                        added.push(a.clone());
                    }
                }
            }
            if ok {
                self.search(state, schema, rest, b, out);
            }
            for a in added {
                b.remove(&a);
            }
        }
    }

    /// Applicable ground actions as (schema name, successor state).
    pub fn successors(&self, state: &BTreeSet<Fact>) -> Vec<(String, BTreeSet<Fact>)> {
        let mut out = Vec::new();
        for schema in &self.schemas {
            let positives: Vec<&Literal> = schema.pre.iter().filter(|l| !l.negated).collect();
            let mut bindings = Vec::new();
            self.search(state, schema, &positives, &mut Binding::new(), &mut bindings);
            for b in bindings {
                let mut next = state.clone();
                for l in &schema.del {
                    next.remove(&ground(l, &b));
                }
                for l in &schema.add {
                    next.insert(ground(l, &b));
                }
                out.push((schema.name.clone(), next));
            }
        }
        out
    }

    pub fn is_goal(&self, state: &BTreeSet<Fact>) -> bool {
        self.goal.iter().all(|g| self.holds(state, g))
    }
}
