//! Independent oracles and generators shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use algorec_core::code_model::{AstNode, AttrValue, NodeKind, Role};
use algorec_core::structural::{AttrMatcher, NodePattern, PatternId, PatternNode, StructuralPattern, Witness};
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------- embedding

/// Pre-order view with parent links, built recursively.
pub struct OracleTree<'a> {
    pub nodes: Vec<&'a AstNode>,
    pub parent: Vec<Option<usize>>,
}

impl<'a> OracleTree<'a> {
    pub fn new(root: &'a AstNode) -> Self {
        fn walk<'a>(n: &'a AstNode, parent: Option<usize>, t: &mut OracleTree<'a>) {
            let id = t.nodes.len();
            t.nodes.push(n);
            t.parent.push(parent);
            for c in &n.children {
                walk(c, Some(id), t);
            }
        }
        let mut t = OracleTree {
            nodes: Vec::new(),
            parent: Vec::new(),
        };
        walk(root, None, &mut t);
        t
    }

    fn ancestors(&self, mut n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.parent[n] {
            out.push(p);
            n = p;
        }
        out
    }

    pub fn is_proper_descendant(&self, anc: usize, n: usize) -> bool {
        self.ancestors(n).contains(&anc)
    }

    /// `n` is the `role` child of `parent` or below one.
    pub fn in_role_subtree(&self, parent: usize, role: Role, n: usize) -> bool {
        let mut cur = n;
        loop {
            match self.parent[cur] {
                None => return false,
                Some(p) if p == parent => return self.nodes[cur].role == Some(role),
                Some(p) => cur = p,
            }
        }
    }
}

/// A node pattern with where it has to land relative to its parent's image.
#[derive(Clone, Debug)]
pub struct Placed {
    pub id: PatternId,
    pub parent: Option<PatternId>,
    pub role: Option<Role>,
}

/// Every way of resolving `or`s; `and`s contribute all their branches.
pub fn alternatives(p: &StructuralPattern) -> Vec<Vec<Placed>> {
    fn go(p: &StructuralPattern, id: PatternId, parent: Option<PatternId>, role: Option<Role>) -> Vec<Vec<Placed>> {
        match p.node(id) {
            PatternNode::Or(bs) => bs.iter().flat_map(|&b| go(p, b, parent, role)).collect(),
            PatternNode::And(bs) => {
                let mut acc = vec![Vec::new()];
                for &b in bs {
                    acc = product(&acc, &go(p, b, parent, role));
                }
                acc
            }
            PatternNode::Node(np) => {
                let mut acc = vec![vec![Placed { id, parent, role }]];
                for slot in &np.children {
                    acc = product(&acc, &go(p, slot.node, Some(id), slot.role));
                }
                acc
            }
        }
    }
    fn product(a: &[Vec<Placed>], b: &[Vec<Placed>]) -> Vec<Vec<Placed>> {
        let mut out = Vec::new();
        for x in a {
            for y in b {
                let mut z = x.clone();
                z.extend(y.iter().cloned());
                out.push(z);
            }
        }
        out
    }
    go(p, p.root, None, None)
}

fn text_of(n: &AstNode, key: &str) -> Option<String> {
    match n.attrs.get(key)? {
        AttrValue::Text(s) => Some(s.clone()),
        AttrValue::List(l) => Some(l.join(",")),
    }
}

/// Kind, literal and regex constraints plus the shape of capture attributes.
pub fn locally_ok(np: &NodePattern, n: &AstNode) -> bool {
    if let Some(k) = np.kind {
        if k != n.kind {
            return false;
        }
    }
    for a in &np.attrs {
        let ok = match &a.matcher {
            AttrMatcher::Exact(v) => text_of(n, &a.key).as_deref() == Some(v.as_str()),
            AttrMatcher::Regex(r) => text_of(n, &a.key).map(|t| r.is_match(&t)).unwrap_or(false),
            AttrMatcher::Capture(_) => matches!(n.attrs.get(&a.key), Some(AttrValue::Text(_))),
            AttrMatcher::Captures(cs) => match n.attrs.get(&a.key) {
                Some(AttrValue::List(l)) => l.len() == cs.len(),
                _ => false,
            },
        };
        if !ok {
            return false;
        }
    }
    true
}

fn node_pattern(p: &StructuralPattern, id: PatternId) -> &NodePattern {
    match p.node(id) {
        PatternNode::Node(np) => np,
        _ => panic!("combinator in placed list"),
    }
}

/// Checks one complete assignment of AST nodes to placed pattern nodes.
pub fn assignment_ok(p: &StructuralPattern, tree: &OracleTree<'_>, placed: &[Placed], image: &[usize]) -> Option<BTreeMap<String, String>> {
    for i in 0..image.len() {
        for j in i + 1..image.len() {
            if image[i] == image[j] {
                return None;
            }
        }
    }
    let pos = |id: PatternId| placed.iter().position(|q| q.id == id).unwrap();
    for (k, q) in placed.iter().enumerate() {
        if let Some(par) = q.parent {
            let pi = image[pos(par)];
            let ok = match q.role {
                None => tree.is_proper_descendant(pi, image[k]),
                Some(r) => tree.in_role_subtree(pi, r, image[k]),
            };
            if !ok {
                return None;
            }
        }
    }
    let mut env: BTreeMap<String, String> = BTreeMap::new();
    for (k, q) in placed.iter().enumerate() {
        let n = tree.nodes[image[k]];
        for a in &node_pattern(p, q.id).attrs {
            let pairs: Vec<(String, String)> = match (&a.matcher, n.attrs.get(&a.key)) {
                (AttrMatcher::Capture(c), Some(AttrValue::Text(t))) => vec![(c.clone(), t.clone())],
                (AttrMatcher::Captures(cs), Some(AttrValue::List(l))) => cs.iter().cloned().zip(l.iter().cloned()).collect(),
                _ => vec![],
            };
            for (c, t) in pairs {
                if let Some(old) = env.get(&c) {
                    if *old != t {
                        return None;
                    }
                }
                env.insert(c, t);
            }
        }
    }
    for (x, y) in &p.equalities {
        if let (Some(a), Some(b)) = (env.get(x), env.get(y)) {
            if a != b {
                return None;
            }
        }
    }
    Some(env)
}

/// Exhaustive search: every resolution of the combinators, then every tuple
/// of locally admissible AST nodes, extended one pattern node at a time and
/// abandoned as soon as injectivity or placement fails.
pub fn oracle_embeds(p: &StructuralPattern, ast: &AstNode) -> bool {
    let tree = OracleTree::new(ast);
    for placed in alternatives(p) {
        let cands: Vec<Vec<usize>> = placed
            .iter()
            .map(|q| {
                let np = node_pattern(p, q.id);
                (0..tree.nodes.len()).filter(|&i| locally_ok(np, tree.nodes[i])).collect()
            })
            .collect();
        if cands.iter().any(Vec::is_empty) {
            continue;
        }
        let mut image = Vec::with_capacity(placed.len());
        if extend(p, &tree, &placed, &cands, &mut image) {
            return true;
        }
    }
    false
}

fn placement_ok(tree: &OracleTree<'_>, placed: &[Placed], image: &[usize], k: usize, c: usize) -> bool {
    let Some(par) = placed[k].parent else { return true };
    // parents precede children in every resolution
    let Some(pos) = placed[..image.len()].iter().position(|q| q.id == par) else {
        return true;
    };
    let pi = image[pos];
    match placed[k].role {
        None => tree.is_proper_descendant(pi, c),
        Some(r) => tree.in_role_subtree(pi, r, c),
    }
}

fn extend(p: &StructuralPattern, tree: &OracleTree<'_>, placed: &[Placed], cands: &[Vec<usize>], image: &mut Vec<usize>) -> bool {
    let k = image.len();
    if k == placed.len() {
        return assignment_ok(p, tree, placed, image).is_some();
    }
    for &c in &cands[k] {
        if image.contains(&c) || !placement_ok(tree, placed, image, k, c) {
            continue;
        }
        image.push(c);
        // forward check: pending nodes with a placed parent keep a free candidate
        let viable = (k + 1..placed.len()).all(|j| {
            cands[j]
                .iter()
                .any(|&d| !image.contains(&d) && placement_ok(tree, placed, image, j, d))
        });
        if viable && extend(p, tree, placed, cands, image) {
            return true;
        }
        image.pop();
    }
    false
}

/// Replays a witness against every constraint, without using the matcher.
pub fn check_witness(p: &StructuralPattern, ast: &AstNode, w: &Witness) -> Result<(), String> {
    let tree = OracleTree::new(ast);
    let image: BTreeMap<PatternId, usize> = w.mapping.iter().map(|e| (e.pattern_node, e.ast_node)).collect();
    if image.len() != w.mapping.len() {
        return Err("pattern node mapped twice".into());
    }
    for e in &w.mapping {
        let n = tree.nodes.get(e.ast_node).ok_or("ast index out of range")?;
        if n.span != e.span || n.kind != e.kind {
            return Err(format!("entry {e:?} does not describe node {}", e.ast_node));
        }
    }
    // the mapped nodes must form one complete resolution of the pattern
    let placed = alternatives(p)
        .into_iter()
        .find(|alt| alt.len() == image.len() && alt.iter().all(|q| image.contains_key(&q.id)))
        .ok_or("witness is not a complete resolution of the pattern")?;
    let img: Vec<usize> = placed.iter().map(|q| image[&q.id]).collect();
    for q in &placed {
        if !locally_ok(node_pattern(p, q.id), tree.nodes[image[&q.id]]) {
            return Err(format!("pattern node {} violates kind/attributes", q.id));
        }
    }
    let env = assignment_ok(p, &tree, &placed, &img).ok_or("structure, injectivity or captures violated")?;
    if env != w.env {
        return Err(format!("env mismatch: {env:?} vs {:?}", w.env));
    }
    Ok(())
}

// ------------------------------------------------------------- generation

pub const OPS: &[&str] = &[
    "+", "-", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", ">>", ">>>", "=", "+=", "-=", "/=",
];
pub const VALUES: &[&str] = &["0", "1", "2", "10"];
pub const NAMES: &[&str] = &["charAt", "reverse", "f", "x", "i", "j"];
pub const INDEX_TEXTS: &[&str] = &["i", "j", "k", "i + 1"];
const ROLES: &[Option<Role>] = &[
    None,
    None,
    Some(Role::Target),
    Some(Role::Source),
    Some(Role::Condition),
    Some(Role::Body),
];

fn random_attrs<R: Rng>(rng: &mut R, kind: NodeKind) -> BTreeMap<String, AttrValue> {
    let mut attrs = BTreeMap::new();
    let text = |s: &str| AttrValue::Text(s.to_string());
    match kind {
        NodeKind::BinaryOp | NodeKind::UnaryOp | NodeKind::Assign => {
            attrs.insert("op".into(), text(OPS.choose(rng).unwrap()));
        }
        NodeKind::Literal => {
            attrs.insert("value".into(), text(VALUES.choose(rng).unwrap()));
        }
        NodeKind::Call => {
            attrs.insert("name".into(), text(NAMES.choose(rng).unwrap()));
            if rng.gen_bool(0.4) {
                attrs.insert("recursive".into(), text("true"));
            }
        }
        NodeKind::ArrayAccess => {
            let n = rng.gen_range(1..=2);
            let idx = (0..n).map(|_| INDEX_TEXTS.choose(rng).unwrap().to_string()).collect();
            attrs.insert("indices".into(), AttrValue::List(idx));
        }
        NodeKind::IdentifierRef | NodeKind::VarDecl | NodeKind::Method => {
            attrs.insert("name".into(), text(NAMES.choose(rng).unwrap()));
        }
        _ => {}
    }
    attrs
}

fn random_node<R: Rng>(rng: &mut R, kind: NodeKind) -> AstNode {
    let mut n = AstNode::new(kind, 0..0);
    n.attrs = random_attrs(rng, kind);
    n.role = *ROLES.choose(rng).unwrap();
    n
}

/// Random tree with exactly `size` nodes, kinds uniform over all node kinds.
pub fn random_ast<R: Rng>(rng: &mut R, size: usize) -> AstNode {
    assert!(size >= 1);
    // build as parent array, then materialise
    let kinds: Vec<NodeKind> = (0..size).map(|_| *NodeKind::ALL.choose(rng).unwrap()).collect();
    let parents: Vec<usize> = (1..size).map(|i| rng.gen_range(0..i)).collect();
    let mut nodes: Vec<AstNode> = kinds.iter().map(|&k| random_node(rng, k)).collect();
    for i in (1..size).rev() {
        let child = std::mem::replace(&mut nodes[i], AstNode::new(NodeKind::Other, 0..0));
        nodes[parents[i - 1]].children.insert(0, child);
    }
    let mut root = nodes.swap_remove(0);
    assign_spans(&mut root, 0);
    root
}

/// Gives every node a distinct, properly nested span.
pub fn assign_spans(n: &mut AstNode, start: usize) -> usize {
    let mut pos = start + 1;
    for c in &mut n.children {
        pos = assign_spans(c, pos) + 1;
    }
    n.span = start..pos;
    pos
}

/// A concrete subtree satisfying one random resolution of the pattern.
fn instantiate<R: Rng>(rng: &mut R, p: &StructuralPattern, id: PatternId, role: Option<Role>) -> Vec<AstNode> {
    match p.node(id) {
        PatternNode::Or(bs) => {
            let b = *bs.choose(rng).unwrap();
            instantiate(rng, p, b, role)
        }
        PatternNode::And(bs) => bs.iter().flat_map(|&b| instantiate(rng, p, b, role)).collect(),
        PatternNode::Node(np) => {
            let kind = np.kind.unwrap_or_else(|| *NodeKind::ALL.choose(rng).unwrap());
            let mut n = random_node(rng, kind);
            n.role = role;
            for a in &np.attrs {
                let v = match &a.matcher {
                    AttrMatcher::Exact(v) => AttrValue::Text(v.clone()),
                    AttrMatcher::Regex(r) => {
                        let pool: Vec<&&str> = OPS.iter().chain(VALUES).chain(NAMES).filter(|s| r.is_match(s)).collect();
                        match pool.choose(rng) {
                            Some(s) => AttrValue::Text(s.to_string()),
                            None => continue,
                        }
                    }
                    AttrMatcher::Capture(_) => AttrValue::Text(NAMES.choose(rng).unwrap().to_string()),
                    AttrMatcher::Captures(cs) => AttrValue::List(cs.iter().map(|_| ["i", "j"].choose(rng).unwrap().to_string()).collect()),
                };
                n.attrs.insert(a.key.clone(), v);
            }
            for slot in &np.children {
                for mut child in instantiate(rng, p, slot.node, slot.role) {
                    if slot.role.is_none() && rng.gen_bool(0.3) {
                        // bury the child one level deeper
                        let k = *NodeKind::ALL.choose(rng).unwrap();
                        let mut wrap = random_node(rng, k);
                        wrap.role = child.role.take();
                        wrap.children.push(child);
                        child = wrap;
                    }
                    n.children.push(child);
                }
            }
            vec![n]
        }
    }
}

fn mutate<R: Rng>(rng: &mut R, n: &mut AstNode) {
    let total = n.node_count();
    let target = rng.gen_range(0..total);
    fn nth<'a>(n: &'a mut AstNode, k: &mut usize) -> Option<&'a mut AstNode> {
        if *k == 0 {
            return Some(n);
        }
        *k -= 1;
        for c in &mut n.children {
            if let Some(x) = nth(c, k) {
                return Some(x);
            }
        }
        None
    }
    let mut k = target;
    let node = nth(n, &mut k).unwrap();
    match rng.gen_range(0..4) {
        0 => node.kind = *NodeKind::ALL.choose(rng).unwrap(),
        1 => node.role = *ROLES.choose(rng).unwrap(),
        2 => {
            node.attrs = random_attrs(rng, node.kind);
        }
        _ => {
            if !node.children.is_empty() {
                let i = rng.gen_range(0..node.children.len());
                let removed = node.children.remove(i);
                node.children.extend(removed.children);
            }
        }
    }
}

/// Random tree with a (possibly mutated) instance of `p` grafted in, at most
/// `max_nodes` nodes.
pub fn planted_ast<R: Rng>(rng: &mut R, p: &StructuralPattern, max_nodes: usize) -> AstNode {
    loop {
        let mut parts = instantiate(rng, p, p.root, None);
        let planted: usize = parts.iter().map(AstNode::node_count).sum();
        if planted + 1 > max_nodes {
            continue;
        }
        let budget = max_nodes - planted;
        let host_size = rng.gen_range(1..=budget);
        let mut host = random_ast(rng, host_size);
        // graft every part under random host nodes
        for part in parts.drain(..) {
            let count = host.node_count();
            let mut k = rng.gen_range(0..count);
            fn graft(n: &mut AstNode, k: &mut usize, part: &mut Option<AstNode>) {
                if *k == 0 {
                    if let Some(p) = part.take() {
                        n.children.push(p);
                    }
                    return;
                }
                *k -= 1;
                for c in &mut n.children {
                    graft(c, k, part);
                    if part.is_none() {
                        return;
                    }
                }
            }
            let mut slot = Some(part);
            graft(&mut host, &mut k, &mut slot);
        }
        for _ in 0..rng.gen_range(0..3) {
            mutate(rng, &mut host);
        }
        if host.node_count() <= max_nodes {
            assign_spans(&mut host, 0);
            return host;
        }
    }
}

// ----------------------------------------------------------------- keywords

/// Identifier segments of `text`, lowercased, grouped per alphanumeric run.
pub fn segment_runs(text: &str) -> Vec<Vec<String>> {
    let mut runs = Vec::new();
    for run in text.split(|c: char| !c.is_ascii_alphanumeric()).filter(|r| !r.is_empty()) {
        let chars: Vec<char> = run.chars().collect();
        let mut segs = Vec::new();
        let mut cur = String::new();
        for i in 0..chars.len() {
            let c = chars[i];
            if i > 0 {
                let p = chars[i - 1];
                let split = (p.is_ascii_alphabetic() != c.is_ascii_alphabetic())
                    || (p.is_ascii_lowercase() && c.is_ascii_uppercase())
                    || (p.is_ascii_uppercase() && c.is_ascii_uppercase() && chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase()));
                if split {
                    segs.push(std::mem::take(&mut cur));
                }
            }
            cur.push(c.to_ascii_lowercase());
        }
        segs.push(cur);
        runs.push(segs);
    }
    runs
}

/// A plain word hits when it spells out consecutive segments of one run.
pub fn word_hits_by_segments(word: &str, text: &str) -> bool {
    let w = word.to_ascii_lowercase();
    segment_runs(text).iter().any(|segs| {
        (0..segs.len()).any(|i| {
            let mut acc = String::new();
            for s in &segs[i..] {
                acc.push_str(s);
                if acc == w {
                    return true;
                }
                if acc.len() >= w.len() {
                    break;
                }
            }
            false
        })
    })
}

// ---------------------------------------------------------------------------
// Mini-corpus fixtures and an independent recount of the mock's scores.

pub fn fixtures_dir() -> std::path::PathBuf {
    // also included from the cli crate, hence the detour through ../core
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// Java tree plus the extra snippet records, in that order.
pub fn minicorpus_records() -> Vec<algorec_core::MethodRecord> {
    let dir = fixtures_dir().join("minicorpus");
    let mut records = algorec_core::code_model::load_corpus(&dir.join("java"))
        .expect("mini-corpus loads")
        .records;
    records.extend(
        algorec_core::code_model::load_corpus(&dir.join("extra.jsonl"))
            .expect("extra records load")
            .records,
    );
    records
}

/// Labels read off the file layout: `<algorithm>/pos*` and `<algorithm>/neg*`.
/// The snippet dump holds one truncated Fibonacci positive; `unlabeled/` has
/// no labels.
pub fn label_from_path(file_path: &str) -> Option<(algorec_core::Algorithm, algorec_core::eval::Label)> {
    use algorec_core::eval::Label;
    if file_path.starts_with("dumps/") {
        return Some((algorec_core::Algorithm::Fibonacci, Label::Positive));
    }
    let (dir, file) = file_path.split_once('/')?;
    let algo = dir.parse().ok()?;
    if file.starts_with("pos") {
        Some((algo, Label::Positive))
    } else if file.starts_with("neg") {
        Some((algo, Label::Negative))
    } else {
        None
    }
}

/// File stem of a record, e.g. `neg_sig_03`.
pub fn stem_of(file_path: &str) -> &str {
    let file = file_path.rsplit('/').next().unwrap_or(file_path);
    file.split('.').next().unwrap_or(file)
}

pub fn mock_signature(algo: algorec_core::Algorithm) -> &'static str {
    use algorec_core::Algorithm::*;
    match algo {
        PrimeFactors => "primeFactors(",
        Gcd => "gcd(",
        Fibonacci => "fibonacci(",
        Palindrome => "isPalindrome(",
        BubbleSort => "bubbleSort(",
        BinarySearch => "binarySearch(",
        TransposeMatrix => "transpose(",
    }
}

/// Recall Focused words per algorithm, read straight from the shipped JSON.
pub fn recall_focused_words() -> BTreeMap<String, Vec<Vec<String>>> {
    let v: serde_json::Value = serde_json::from_str(algorec_core::shipped::RECALL_FOCUSED_JSON).unwrap();
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let groups = p["groups"]
                .as_array()
                .unwrap()
                .iter()
                .map(|g| {
                    g["regexes"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|r| r.as_str().unwrap().to_string())
                        .collect()
                })
                .collect();
            (p["algorithm"].as_str().unwrap().to_string(), groups)
        })
        .collect()
}

/// The mock's scoring rule re-derived with the segment oracle.
pub fn oracle_mock_score(words: &BTreeMap<String, Vec<Vec<String>>>, algo: algorec_core::Algorithm, source: &str) -> u8 {
    if source.contains(mock_signature(algo)) {
        return 4;
    }
    let hits: usize = words[algo.id()]
        .iter()
        .map(|g| g.iter().filter(|w| word_hits_by_segments(w, source)).count())
        .sum();
    hits.min(3) as u8
}

/// Largest CDF gap evaluated at every sample point, by direct counting.
pub fn ks_bruteforce(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |xs: &[f64], x: f64| xs.iter().filter(|v| **v <= x).count() as f64 / xs.len() as f64;
    a.iter().chain(b).map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
}

pub fn hand_expected() -> serde_json::Value {
    let text = std::fs::read_to_string(fixtures_dir().join("minicorpus/expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn expected_confusion(v: &serde_json::Value) -> algorec_core::eval::Confusion {
    algorec_core::eval::Confusion {
        tp: v["tp"].as_u64().unwrap() as usize,
        fp: v["fp"].as_u64().unwrap() as usize,
        fn_: v["fn"].as_u64().unwrap() as usize,
        tn: v["tn"].as_u64().unwrap() as usize,
    }
}

/// Stems the structural filter is expected to exclude, per algorithm.
pub fn hand_excluded(expected: &serde_json::Value) -> BTreeMap<algorec_core::Algorithm, Vec<String>> {
    expected["structural_excluded"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| {
            (
                k.parse().unwrap(),
                v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect(),
            )
        })
        .collect()
}

/// Confusion matrix recounted from file-name labels, hand exclusion lists
/// and the re-derived mock score. `structural` selects the exclusion lists;
/// `lower_bound` evaluates every record and counts unlabeled predictions as
/// false positives.
pub fn recount(
    records: &[algorec_core::MethodRecord],
    excluded: &BTreeMap<algorec_core::Algorithm, Vec<String>>,
    words: &BTreeMap<String, Vec<Vec<String>>>,
    algo: algorec_core::Algorithm,
    threshold: u8,
    structural: bool,
    lower_bound: bool,
) -> algorec_core::eval::Confusion {
    use algorec_core::eval::{Confusion, Label};
    let mut c = Confusion::default();
    for r in records {
        let label = label_from_path(&r.file_path).filter(|(a, _)| *a == algo).map(|(_, l)| l);
        if label.is_none() && !lower_bound {
            continue;
        }
        let own_dir = r.file_path.split('/').next() == Some(algo.id());
        let is_excluded = structural && own_dir && excluded[&algo].iter().any(|s| s == stem_of(&r.file_path));
        let predicted = !is_excluded && oracle_mock_score(words, algo, &r.source) >= threshold;
        match (label, predicted) {
            (Some(Label::Positive), true) => c.tp += 1,
            (Some(Label::Positive), false) => c.fn_ += 1,
            (Some(Label::Negative), true) => c.fp += 1,
            (Some(Label::Negative), false) => c.tn += 1,
            (None, true) => c.fp += 1,
            (None, false) => {}
        }
    }
    c
}

/// Random verdict sets swept at every threshold. Checks that raising the
/// threshold never raises recall or the FP count, that the chosen threshold
/// attains the maximum macro-F1, and that ties go to the higher threshold.
pub fn sweep_property_trials(trials: usize, seed: u64) -> Result<(), String> {
    use algorec_core::eval::{sweep_thresholds, EvalMode, Label, PipelineRun, ResultRow, RunMeta, SweepOptions};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let algos = algorec_core::Algorithm::ALL;
    for trial in 0..trials {
        let n = rng.gen_range(1..60);
        // a coarse score alphabet makes ties common
        let coarse = rng.gen_bool(0.3);
        let rows: Vec<ResultRow> = (0..n)
            .map(|i| ResultRow {
                algorithm: algos[rng.gen_range(0..if coarse { 2 } else { 7 })],
                method_id: format!("m{i}"),
                label: match rng.gen_range(0..10) {
                    0 => None,
                    k if k < 5 => Some(Label::Positive),
                    _ => Some(Label::Negative),
                },
                excluded: rng.gen_bool(0.2),
                pass_reason: None,
                raw_score: if rng.gen_bool(0.05) {
                    None
                } else {
                    Some(if coarse { 4 * rng.gen_range(0..2) } else { rng.gen_range(0..5) })
                },
                decode_failure: false,
                error: None,
            })
            .collect();
        let mode = if rng.gen_bool(0.5) {
            EvalMode::Standard
        } else {
            EvalMode::LowerBound
        };
        let run = PipelineRun {
            meta: RunMeta {
                filter: "none".into(),
                style: "score".into(),
                backend: "synthetic".into(),
                mode,
                split: Default::default(),
            },
            rows,
        };
        let report = sweep_thresholds(&run, SweepOptions { per_algorithm: true });
        for w in report.thresholds.windows(2) {
            for (lo, hi) in w[0].algorithms.iter().zip(&w[1].algorithms) {
                if hi.recall > lo.recall {
                    return Err(format!(
                        "trial {trial}: recall rose from ST {} to {}",
                        w[0].threshold, w[1].threshold
                    ));
                }
                if hi.confusion.fp > lo.confusion.fp {
                    return Err(format!("trial {trial}: FP rose from ST {} to {}", w[0].threshold, w[1].threshold));
                }
            }
        }
        let max = report.thresholds.iter().map(|t| t.macro_f1).fold(f64::NEG_INFINITY, f64::max);
        if report.best().macro_f1 != max {
            return Err(format!(
                "trial {trial}: best threshold {} misses the maximum",
                report.best_threshold
            ));
        }
        let highest_tied = report
            .thresholds
            .iter()
            .filter(|t| t.macro_f1 == max)
            .map(|t| t.threshold)
            .max()
            .unwrap();
        if report.best_threshold != highest_tied {
            return Err(format!("trial {trial}: tie not broken toward the higher threshold"));
        }
    }
    Ok(())
}

/// Ground truth read off the file layout of the mini-corpus.
pub fn minicorpus_truth(records: &[algorec_core::MethodRecord]) -> algorec_core::eval::GroundTruth {
    let mut truth = algorec_core::eval::GroundTruth::new();
    for r in records {
        if let Some((algo, label)) = label_from_path(&r.file_path) {
            truth.insert(algo, r.method_id.clone(), label).unwrap();
        }
    }
    truth
}

/// Runs the mock score-style pipeline over `corpus`.
pub fn mock_run(
    corpus: &[algorec_core::MethodRecord],
    truth: &algorec_core::eval::GroundTruth,
    filter: &algorec_core::eval::MethodFilter,
    mode: algorec_core::eval::EvalMode,
) -> algorec_core::eval::PipelineRun {
    use algorec_core::eval::{run_pipeline, PipelineConfig, SplitSelection};
    use algorec_core::llm::{BatchOptions, MockBackend, StyleKind, StyleSpec};
    let library = algorec_core::shipped::example_library();
    let backend = MockBackend::new();
    let style = StyleSpec::new(StyleKind::Score);
    let cfg = PipelineConfig {
        filter,
        style: &style,
        library: &library,
        backend: &backend,
        batch: BatchOptions::default(),
        mode,
        split: None,
        selection: SplitSelection::All,
        exec: algorec_core::Execution::default(),
    };
    run_pipeline(corpus, truth, &cfg).expect("pipeline runs").run
}
