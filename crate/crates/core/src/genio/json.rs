use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{Agent, Instance, Project, ProjectSet, Valuation};
use crate::rational::Rational;

fn rat(x: &Rational) -> Value {
    Value::String(x.to_fraction_string())
}

fn rats(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rat).collect())
}

fn valuation_value(v: &Valuation) -> Value {
    match v {
        Valuation::Additive(values) => json!({ "type": "additive", "values": rats(values) }),
        Valuation::SingleMinded { demand, value } => {
            json!({ "type": "single_minded", "demand": demand.as_slice(), "value": rat(value) })
        }
        Valuation::Symmetric(by_count) => json!({ "type": "symmetric", "by_count": rats(by_count) }),
        Valuation::Table(entries) => json!({ "type": "table", "entries": rats(entries) }),
    }
}

/// Canonical text: keys sorted, rationals as `"p/q"` strings.
pub fn save_instance(instance: &Instance) -> String {
    let projects: Vec<Value> = instance
        .projects
        .iter()
        .map(|p| {
            let mut obj = Map::new();
            obj.insert("cost".into(), rat(&p.cost));
            if let Some(name) = &p.name {
                obj.insert("name".into(), Value::String(name.clone()));
            }
            Value::Object(obj)
        })
        .collect();
    let agents: Vec<Value> = instance
        .agents
        .iter()
        .map(|a| json!({ "budget": rat(&a.budget), "valuation": valuation_value(&a.valuation) }))
        .collect();
    let doc = json!({ "projects": projects, "agents": agents });
    let mut text = serde_json::to_string_pretty(&doc).expect("values always serialize");
    text.push('\n');
    text
}

fn schema(path: &str, what: &str) -> Error {
    Error::Schema(format!("{path}: {what}"))
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&format!("{path}.{key}"), "missing"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn parse_rational(v: &Value, path: &str) -> Result<Rational> {
    let parsed = match v {
        Value::String(s) => s.parse().ok(),
        Value::Number(n) => n.to_string().parse().ok(),
        _ => None,
    };
    parsed.ok_or_else(|| schema(path, "expected a rational such as \"3/4\""))
}

fn parse_rationals(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| parse_rational(x, &format!("{path}[{i}]"))).collect()
}

fn parse_valuation(v: &Value, path: &str) -> Result<Valuation> {
    let obj = object(v, path)?;
    let kind =
        field(obj, path, "type")?.as_str().ok_or_else(|| schema(&format!("{path}.type"), "expected a string"))?;
    let sub = |key: &str| -> Result<(&Value, String)> { Ok((field(obj, path, key)?, format!("{path}.{key}"))) };
    Ok(match kind {
        "additive" => {
            let (x, p) = sub("values")?;
            Valuation::Additive(parse_rationals(x, &p)?)
        }
        "single_minded" => {
            let (d, dp) = sub("demand")?;
            let demand = array(d, &dp)?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_u64().map(|j| j as usize).ok_or_else(|| schema(&format!("{dp}[{i}]"), "expected an index"))
                })
                .collect::<Result<ProjectSet>>()?;
            let (z, zp) = sub("value")?;
            Valuation::SingleMinded { demand, value: parse_rational(z, &zp)? }
        }
        "symmetric" => {
            let (x, p) = sub("by_count")?;
            Valuation::Symmetric(parse_rationals(x, &p)?)
        }
        "table" => {
            let (x, p) = sub("entries")?;
            Valuation::Table(parse_rationals(x, &p)?)
        }
        other => return Err(schema(&format!("{path}.type"), &format!("unknown valuation type {other:?}"))),
    })
}

/// Parses the instance document. Shape is checked here; semantic checks
/// belong to [`crate::model::validate_instance`].
pub fn load_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let top = object(&doc, "$")?;
    let projects = array(field(top, "$", "projects")?, "projects")?
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let path = format!("projects[{j}]");
            let obj = object(p, &path)?;
            let name = match obj.get("name") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(_) => return Err(schema(&format!("{path}.name"), "expected a string")),
            };
            Ok(Project { name, cost: parse_rational(field(obj, &path, "cost")?, &format!("{path}.cost"))? })
        })
        .collect::<Result<Vec<_>>>()?;
    let agents = array(field(top, "$", "agents")?, "agents")?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let path = format!("agents[{i}]");
            let obj = object(a, &path)?;
            Ok(Agent {
                budget: parse_rational(field(obj, &path, "budget")?, &format!("{path}.budget"))?,
                valuation: parse_valuation(field(obj, &path, "valuation")?, &format!("{path}.valuation"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance::new(projects, agents))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{nested_instance, three_towns};
    use crate::rational::q;

    const THREE_TOWNS: &str = r#"{
  "projects": [
    {"name": "hall", "cost": "5/1"},
    {"name": "shelter", "cost": "4/1"},
    {"name": "pool", "cost": "2/1"}
  ],
  "agents": [
    {"budget": "2/1", "valuation": {"type": "additive", "values": ["2/1", "1/1", "2/1"]}},
    {"budget": "3/1", "valuation": {"type": "additive", "values": ["1/1", "2/1", "2/1"]}},
    {"budget": "1/1", "valuation": {"type": "additive", "values": ["4/1", "3/1", "1/1"]}}
  ]
}"#;

    #[test]
    fn three_towns_document() {
        assert_eq!(load_instance(THREE_TOWNS).unwrap(), three_towns());
    }

    #[test]
    fn round_trips() {
        let mut i = nested_instance();
        i.projects[0].name = None;
        i.agents[0].budget = q(-7, 3);
        i.agents.push(Agent { budget: q(1, 9), valuation: Valuation::Symmetric(vec![q(0, 1), q(5, 2)]) });
        i.agents.push(Agent { budget: q(1, 9), valuation: Valuation::Table(vec![q(0, 1), q(1, 2), q(1, 3), q(1, 1)]) });
        let text = save_instance(&i);
        assert_eq!(load_instance(&text).unwrap(), i);
        assert_eq!(save_instance(&load_instance(&text).unwrap()), text);
    }

    #[test]
    fn missing_cost_names_the_field() {
        let text = r#"{"projects": [{"name": "x"}], "agents": []}"#;
        let err = load_instance(text).unwrap_err();
        assert!(matches!(&err, Error::Schema(s) if s.starts_with("projects[0].cost")), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = load_instance("{\n  \"projects\": [,]\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = load_instance(r#"{"projects": [], "agents": [{"budget": "x", "valuation": {}}]}"#).unwrap_err();
        assert!(matches!(&err, Error::Schema(s) if s.starts_with("agents[0].budget")), "{err}");
    }

    #[test]
    fn accepts_plain_numbers() {
        let text = r#"{"projects": [{"cost": 2}], "agents": [{"budget": "1.5", "valuation": {"type": "additive", "values": [3]}}]}"#;
        let i = load_instance(text).unwrap();
        assert_eq!(i.agents[0].budget, q(3, 2));
        assert_eq!(i.projects[0].name, None);
    }
}
