//! JSON interchange for automata.
//!
//! A document is either a preset reference with parameters,
//!
//! ```json
//! { "preset": { "name": "Z_wr_Z", "seq": "i+2" } }
//! ```
//!
//! or an explicit description with an alphabet, a state list, and a table
//! program — `constant` tables for a Mealy machine or per-level tables up to
//! a horizon. Output maps are written in cycle notation using display
//! letters; transition rows are arrays of state names keyed by the source
//! state. Unknown fields are rejected, and every diagnostic carries the
//! field path it refers to. [`export_tables`] writes the horizon-limited
//! tables of any automaton in the same format, so exports reparse to
//! table-equal automata.

use serde_json::{json, Map, Value};

use crate::alphabet::{ChangingAlphabet, ParamSeq};
use crate::analysis::RelationSuite;
use crate::automaton::{LevelTables, StateId, TVAutomaton};
use crate::perm::LevelPermutation;
use crate::presets::{build_preset, PresetBundle, PresetParams};
use crate::{Error, Result};

/// Parses a JSON automaton description into a bundle. Preset references
/// carry their family's relation suite; explicit automata get an empty one.
pub fn parse_spec(text: &str) -> Result<PresetBundle> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let root = as_object(&value, "$")?;
    if root.contains_key("preset") {
        expect_keys(root, "$", &["preset"])?;
        parse_preset(get(root, "preset", "$")?, "$.preset")
    } else {
        parse_explicit(root)
    }
}

fn parse_preset(value: &Value, path: &str) -> Result<PresetBundle> {
    let obj = as_object(value, path)?;
    expect_keys(
        obj,
        path,
        &["name", "seq", "n", "r", "free_rank", "torsion", "seed"],
    )?;
    let name = as_str(get(obj, "name", path)?, &format!("{path}.name"))?;
    let mut params = PresetParams::default();
    if let Some(v) = obj.get("seq") {
        let text = as_str(v, &format!("{path}.seq"))?;
        params.seq = Some(
            text.parse::<ParamSeq>()
                .map_err(|e| Error::Parse(format!("at {path}.seq: {e}")))?,
        );
    }
    if let Some(v) = obj.get("n") {
        params.n = Some(as_usize(v, &format!("{path}.n"))?);
    }
    if let Some(v) = obj.get("r") {
        params.r = Some(as_usize(v, &format!("{path}.r"))? as u32);
    }
    if let Some(v) = obj.get("free_rank") {
        params.free_rank = Some(as_usize(v, &format!("{path}.free_rank"))?);
    }
    if let Some(v) = obj.get("torsion") {
        let items = as_array(v, &format!("{path}.torsion"))?;
        let mut torsion = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            torsion.push(as_usize(item, &format!("{path}.torsion[{i}]"))? as u32);
        }
        params.torsion = Some(torsion);
    }
    if let Some(v) = obj.get("seed") {
        params.seed = Some(as_usize(v, &format!("{path}.seed"))? as u64);
    }
    build_preset(name, &params)
}

fn parse_explicit(root: &Map<String, Value>) -> Result<PresetBundle> {
    expect_keys(
        root,
        "$",
        &["name", "alphabet", "display_offset", "states", "program"],
    )?;
    let name = match root.get("name") {
        Some(v) => as_str(v, "$.name")?.to_string(),
        None => "custom".to_string(),
    };
    let alphabet = parse_alphabet(get(root, "alphabet", "$")?)?;
    let display_offset = match root.get("display_offset") {
        Some(v) => as_usize(v, "$.display_offset")?,
        None => 0,
    };
    let states = parse_states(get(root, "states", "$")?)?;
    let automaton = parse_program(
        get(root, "program", "$")?,
        alphabet,
        states,
        display_offset,
    )?;
    Ok(PresetBundle {
        name,
        automaton,
        wreath: None,
        suite: RelationSuite::default(),
    })
}

fn parse_alphabet(value: &Value) -> Result<ChangingAlphabet> {
    let path = "$.alphabet";
    let obj = as_object(value, path)?;
    let kind = as_str(get(obj, "kind", path)?, &format!("{path}.kind"))?;
    match kind {
        "constant" => {
            expect_keys(obj, path, &["kind", "size"])?;
            ChangingAlphabet::constant(as_usize(get(obj, "size", path)?, "$.alphabet.size")?)
        }
        "horizon" => {
            expect_keys(obj, path, &["kind", "sizes"])?;
            let items = as_array(get(obj, "sizes", path)?, "$.alphabet.sizes")?;
            let mut sizes = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                sizes.push(as_usize(item, &format!("{path}.sizes[{i}]"))?);
            }
            ChangingAlphabet::with_horizon(sizes)
        }
        "parametric" => {
            expect_keys(obj, path, &["kind", "multiplier", "offset", "seq"])?;
            let multiplier = as_usize(get(obj, "multiplier", path)?, "$.alphabet.multiplier")?;
            let offset = as_usize(get(obj, "offset", path)?, "$.alphabet.offset")?;
            let seq = as_str(get(obj, "seq", path)?, "$.alphabet.seq")?
                .parse::<ParamSeq>()
                .map_err(|e| Error::Parse(format!("at {path}.seq: {e}")))?;
            ChangingAlphabet::parametric(multiplier, offset, seq)
        }
        other => Err(Error::Parse(format!(
            "at {path}.kind: unknown alphabet kind `{other}` \
             (expected constant, horizon, or parametric)"
        ))),
    }
}

fn parse_states(value: &Value) -> Result<Vec<String>> {
    let items = as_array(value, "$.states")?;
    let mut states = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        states.push(as_str(item, &format!("$.states[{i}]"))?.to_string());
    }
    if states.is_empty() {
        return Err(Error::Parse("at $.states: empty state list".to_string()));
    }
    for (i, name) in states.iter().enumerate() {
        if states[..i].contains(name) {
            return Err(Error::Parse(format!(
                "at $.states[{i}]: duplicate state name `{name}`"
            )));
        }
    }
    Ok(states)
}

fn parse_program(
    value: &Value,
    alphabet: ChangingAlphabet,
    states: Vec<String>,
    display_offset: usize,
) -> Result<TVAutomaton> {
    let path = "$.program";
    let obj = as_object(value, path)?;
    let kind = as_str(get(obj, "kind", path)?, &format!("{path}.kind"))?;
    match kind {
        "constant" => {
            expect_keys(obj, path, &["kind", "transitions", "outputs"])?;
            let size = alphabet.size_at(0)?;
            let tables = parse_level_tables(obj, path, &states, size, 0, display_offset)?;
            Ok(TVAutomaton::mealy(alphabet, states, tables)?.with_display_offset(display_offset))
        }
        "levels" => {
            expect_keys(obj, path, &["kind", "levels"])?;
            let items = as_array(get(obj, "levels", path)?, "$.program.levels")?;
            let mut levels = Vec::with_capacity(items.len());
            for (level, item) in items.iter().enumerate() {
                let lpath = format!("{path}.levels[{level}]");
                let lobj = as_object(item, &lpath)?;
                expect_keys(lobj, &lpath, &["transitions", "outputs"])?;
                let size = alphabet.size_at(level)?;
                levels.push(parse_level_tables(
                    lobj,
                    &lpath,
                    &states,
                    size,
                    level,
                    display_offset,
                )?);
            }
            Ok(TVAutomaton::from_level_tables(alphabet, states, levels)?
                .with_display_offset(display_offset))
        }
        other => Err(Error::Parse(format!(
            "at {path}.kind: unknown program kind `{other}` (expected constant or levels)"
        ))),
    }
}

/// Reads one level's `transitions` (state-name rows) and `outputs` (cycle
/// strings in display letters) from `obj`.
fn parse_level_tables(
    obj: &Map<String, Value>,
    path: &str,
    states: &[String],
    size: usize,
    level: usize,
    display_offset: usize,
) -> Result<LevelTables> {
    let state_id = |name: &str, at: &str| -> Result<StateId> {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Parse(format!("at {at}: unknown state `{name}`")))
    };
    let tpath = format!("{path}.transitions");
    let tobj = as_object(get(obj, "transitions", path)?, &tpath)?;
    let opath = format!("{path}.outputs");
    let oobj = as_object(get(obj, "outputs", path)?, &opath)?;
    for (map, mpath) in [(tobj, &tpath), (oobj, &opath)] {
        for key in map.keys() {
            if !states.iter().any(|s| s == key) {
                return Err(Error::Parse(format!(
                    "at {mpath}: row for unknown state `{key}`"
                )));
            }
        }
    }
    let mut transitions = Vec::with_capacity(states.len());
    let mut outputs = Vec::with_capacity(states.len());
    for name in states {
        let rpath = format!("{tpath}.{name}");
        let row = as_array(
            tobj.get(name)
                .ok_or_else(|| Error::Parse(format!("at {tpath}: missing row for `{name}`")))?,
            &rpath,
        )?;
        let mut trow = Vec::with_capacity(row.len());
        for (x, item) in row.iter().enumerate() {
            let cell = format!("{rpath}[{x}]");
            trow.push(state_id(as_str(item, &cell)?, &cell)?);
        }
        transitions.push(trow);

        let cpath = format!("{opath}.{name}");
        let text = as_str(
            oobj.get(name)
                .ok_or_else(|| Error::Parse(format!("at {opath}: missing row for `{name}`")))?,
            &cpath,
        )?;
        let perm = LevelPermutation::parse_cycles(level, size, text, display_offset)?;
        outputs.push(perm.images().to_vec());
    }
    LevelTables::new(size, states.len(), transitions, outputs)
}

/// Writes the first `levels` levels of an automaton as an explicit
/// horizon-limited document; the result reparses to a table-equal automaton.
pub fn export_tables(automaton: &TVAutomaton, levels: usize) -> Result<String> {
    if levels == 0 {
        return Err(Error::BadParameters(
            "table export needs at least one level".to_string(),
        ));
    }
    let offset = automaton.display_offset();
    let mut sizes = Vec::with_capacity(levels);
    let mut level_docs = Vec::with_capacity(levels);
    for level in 0..levels {
        let size = automaton.alphabet().size_at(level)?;
        sizes.push(size);
        let mut transitions = Map::new();
        let mut outputs = Map::new();
        for (q, name) in automaton.states().iter().enumerate() {
            let mut row = Vec::with_capacity(size);
            for x in 0..size {
                let (next, _) = automaton.step(level, q, x)?;
                row.push(Value::String(automaton.state_name(next).to_string()));
            }
            transitions.insert(name.clone(), Value::Array(row));
            let perm = automaton.output_perm(level, q)?;
            outputs.insert(name.clone(), Value::String(perm.cycle_string(offset)));
        }
        level_docs.push(json!({ "transitions": transitions, "outputs": outputs }));
    }
    let doc = json!({
        "alphabet": { "kind": "horizon", "sizes": sizes },
        "display_offset": offset,
        "states": automaton.states(),
        "program": { "kind": "levels", "levels": level_docs },
    });
    Ok(serde_json::to_string_pretty(&doc).expect("document serializes"))
}

fn as_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::Parse(format!("at {path}: expected an object")))
}

fn as_array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("at {path}: expected an array")))
}

fn as_str<'a>(value: &'a Value, path: &str) -> Result<&'a str> {
    value
        .as_str()
        .ok_or_else(|| Error::Parse(format!("at {path}: expected a string")))
}

fn as_usize(value: &Value, path: &str) -> Result<usize> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("at {path}: expected a nonnegative integer")))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("at {path}: missing field `{key}`")))
}

fn expect_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parse(format!(
                "at {path}: unknown field `{key}` (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}
