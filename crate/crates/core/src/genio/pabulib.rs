use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::model::{Agent, Instance, Project, Valuation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PabulibProject {
    pub id: String,
    pub cost: Rational,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PabulibVote {
    pub voter: String,
    /// Approved project ids, deduplicated, in ballot order.
    pub approved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PabulibElection {
    pub meta: BTreeMap<String, String>,
    pub projects: Vec<PabulibProject>,
    pub votes: Vec<PabulibVote>,
}

impl PabulibElection {
    pub fn budget(&self) -> Result<Rational> {
        let raw = self.meta.get("budget").ok_or_else(|| Error::Schema("META.budget: missing".into()))?;
        match raw.trim().parse::<Rational>() {
            Ok(b) if !b.is_negative() => Ok(b),
            _ => Err(Error::Schema(format!("META.budget: {raw:?} is not a nonnegative number"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Meta,
    Projects,
    Votes,
}

/// A section body: the line number of its column header and its text.
struct Block {
    first_line: usize,
    text: String,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().trim_end_matches(';').trim().to_ascii_uppercase().as_str() {
        "META" => Some(Section::Meta),
        "PROJECTS" => Some(Section::Projects),
        "VOTES" => Some(Section::Votes),
        _ => None,
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column: 1, message: message.into() }
}

/// Reads a section as header-keyed rows, each tagged with its line number.
fn rows(block: &Block, name: &str, required: &[&str]) -> Result<Vec<(usize, HashMap<String, String>)>> {
    let mut reader =
        csv::ReaderBuilder::new().delimiter(b';').flexible(true).has_headers(true).from_reader(block.text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_error(block.first_line, e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    for col in required {
        if !headers.iter().any(|h| h == col) {
            return Err(parse_error(block.first_line, format!("{name} section lacks a {col:?} column")));
        }
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(block.first_line, |p| block.first_line + p.line() as usize - 1);
            parse_error(line, e.to_string())
        })?;
        let line = block.first_line + record.position().map_or(0, |p| p.line() as usize - 1);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let row = headers.iter().cloned().zip(record.iter().map(|f| f.trim().to_string())).collect();
        out.push((line, row));
    }
    Ok(out)
}

/// Parses a `.pb` approval election.
pub fn parse_pabulib(text: &str) -> Result<PabulibElection> {
    let mut blocks: HashMap<u8, Block> = HashMap::new();
    let mut current: Option<Section> = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(s) = section_of(line) {
            if blocks.contains_key(&(s as u8)) {
                return Err(parse_error(i + 1, "repeated section"));
            }
            blocks.insert(s as u8, Block { first_line: i + 2, text: String::new() });
            current = Some(s);
            continue;
        }
        match current {
            Some(s) => {
                let block = blocks.get_mut(&(s as u8)).expect("section registered");
                block.text.push_str(line);
                block.text.push('\n');
            }
            None if line.trim().is_empty() => {}
            None => return Err(parse_error(i + 1, "content before the META section")),
        }
    }
    let block = |s: Section, name: &str| {
        blocks
            .get(&(s as u8))
            .ok_or_else(|| parse_error(text.lines().count().max(1), format!("missing {name} section")))
    };

    let mut meta = BTreeMap::new();
    let meta_block = block(Section::Meta, "META")?;
    for (_, row) in rows(meta_block, "META", &["key", "value"])? {
        meta.insert(row["key"].clone(), row["value"].clone());
    }
    match meta.get("vote_type").map(String::as_str) {
        Some("approval") => {}
        Some(other) => return Err(Error::UnsupportedVoteType(other.to_string())),
        None => return Err(Error::Schema("META.vote_type: missing".into())),
    }
    if !meta.contains_key("num_votes") {
        return Err(Error::Schema("META.num_votes: missing".into()));
    }

    let mut projects = Vec::new();
    let mut known = HashMap::new();
    for (line, row) in rows(block(Section::Projects, "PROJECTS")?, "PROJECTS", &["project_id", "cost"])? {
        let id = row["project_id"].clone();
        let cost = match row["cost"].parse::<Rational>() {
            Ok(c) if !c.is_negative() => c,
            _ => return Err(parse_error(line, format!("project {id}: bad cost {:?}", row["cost"]))),
        };
        if known.insert(id.clone(), projects.len()).is_some() {
            return Err(parse_error(line, format!("duplicate project id {id}")));
        }
        let name = row.get("name").filter(|n| !n.is_empty()).cloned();
        projects.push(PabulibProject { id, cost, name });
    }

    let mut votes = Vec::new();
    for (line, row) in rows(block(Section::Votes, "VOTES")?, "VOTES", &["voter_id", "vote"])? {
        let mut approved: Vec<String> = Vec::new();
        for id in row["vote"].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if !known.contains_key(id) {
                return Err(parse_error(line, format!("vote for unknown project {id}")));
            }
            if !approved.iter().any(|a| a == id) {
                approved.push(id.to_string());
            }
        }
        votes.push(PabulibVote { voter: row["voter_id"].clone(), approved });
    }
    let election = PabulibElection { meta, projects, votes };
    election.budget()?;
    Ok(election)
}

/// One additive agent per voter with an equal share of the budget.
/// Approvals are worth a common amount chosen so that total value over all
/// projects equals their total cost.
pub fn pabulib_to_instance(e: &PabulibElection) -> Result<Instance> {
    if e.votes.is_empty() {
        return Err(Error::NoVoters);
    }
    let approvals: usize = e.votes.iter().map(|v| v.approved.len()).sum();
    if approvals == 0 {
        return Err(Error::NoApprovals);
    }
    let index: HashMap<&str, usize> = e.projects.iter().enumerate().map(|(j, p)| (p.id.as_str(), j)).collect();
    let total_cost: Rational = e.projects.iter().map(|p| &p.cost).sum();
    let unit = total_cost / Rational::from_integer(approvals as i64);
    let share = e.budget()? / Rational::from_integer(e.votes.len() as i64);
    let agents = e
        .votes
        .iter()
        .map(|v| {
            let mut values = vec![Rational::zero(); e.projects.len()];
            for id in &v.approved {
                values[index[id.as_str()]] = unit.clone();
            }
            Agent { budget: share.clone(), valuation: Valuation::Additive(values) }
        })
        .collect();
    let projects = e.projects.iter().map(|p| Project { name: Some(p.id.clone()), cost: p.cost.clone() }).collect();
    Ok(Instance::new(projects, agents))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    pub(crate) const FIXTURE: &str = "META
key;value
description;two voters
budget;10
vote_type;approval
num_votes;2
PROJECTS
project_id;cost;name
A;4;Library
B;6;Park
VOTES
voter_id;vote
v1;A
v2;A,B
";

    #[test]
    fn parses_fixture() {
        let e = parse_pabulib(FIXTURE).unwrap();
        assert_eq!((e.projects.len(), e.votes.len()), (2, 2));
        assert_eq!(e.meta["description"], "two voters");
        assert_eq!(e.projects[1].name.as_deref(), Some("Park"));
        assert_eq!(e.votes[1].approved, vec!["A", "B"]);
    }

    #[test]
    fn converts_fixture() {
        let i = pabulib_to_instance(&parse_pabulib(FIXTURE).unwrap()).unwrap();
        let third = q(10, 3);
        assert_eq!(i.agents[0].budget, q(5, 1));
        assert_eq!(i.agents[0].valuation, Valuation::Additive(vec![third.clone(), q(0, 1)]));
        assert_eq!(i.agents[1].valuation, Valuation::Additive(vec![third.clone(), third]));
        let all = i.all_projects();
        assert_eq!(i.values_of(&all).unwrap().iter().sum::<Rational>(), i.cost_of(&all));
    }

    #[test]
    fn semicolon_headers_and_quoting() {
        let text = FIXTURE.replace("META\n", "META;\n").replace("A;4;Library", "A;4;\"Library; north\"");
        let e = parse_pabulib(&text).unwrap();
        assert_eq!(e.projects[0].name.as_deref(), Some("Library; north"));
    }

    #[test]
    fn empty_votes_then_rejected_by_converter() {
        let text = FIXTURE.replace("v1;A\nv2;A,B\n", "");
        let e = parse_pabulib(&text).unwrap();
        assert!(e.votes.is_empty());
        assert_eq!(pabulib_to_instance(&e), Err(Error::NoVoters));
        let blank = FIXTURE.replace("v1;A\nv2;A,B\n", "v1;\n");
        assert_eq!(pabulib_to_instance(&parse_pabulib(&blank).unwrap()), Err(Error::NoApprovals));
    }

    #[test]
    fn rejects_bad_input() {
        let unknown = FIXTURE.replace("v2;A,B", "v2;A,C");
        assert!(matches!(parse_pabulib(&unknown), Err(Error::Parse { line: 14, .. })));
        let cumulative = FIXTURE.replace("approval", "cumulative");
        assert_eq!(parse_pabulib(&cumulative), Err(Error::UnsupportedVoteType("cumulative".into())));
        let no_budget = FIXTURE.replace("budget;10\n", "");
        assert!(matches!(parse_pabulib(&no_budget), Err(Error::Schema(_))));
    }
}
