use super::{MinskyError, MinskyMachine, Op, Transition};

/// Parses the line-oriented machine format:
///
/// ```text
/// states: q0 q1 q2 qf
/// init: q0
/// final: qf
/// trans: q0 inc1 q1
/// ```
///
/// Blank lines and `#` comments are ignored. `states`, `init` and `final`
/// must each appear exactly once, before any transition that uses them.
pub fn parse_machine(text: &str) -> Result<MinskyMachine, MinskyError> {
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<(usize, String)> = None;
    let mut fin: Option<(usize, String)> = None;
    let mut transitions: Vec<(usize, Transition)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: &str| MinskyError::Syntax { line, msg: msg.into() };
        let (key, rest) = content.split_once(':').ok_or_else(|| syntax("expected `key: value`"))?;
        let args: Vec<&str> = rest.split_whitespace().collect();
        match key.trim() {
            "states" => {
                if states.is_some() {
                    return Err(syntax("`states` declared twice"));
                }
                if args.is_empty() {
                    return Err(syntax("`states` needs at least one name"));
                }
                let mut seen: Vec<String> = Vec::new();
                for a in &args {
                    if seen.iter().any(|s| s == a) {
                        return Err(MinskyError::DuplicateState(a.to_string()));
                    }
                    seen.push(a.to_string());
                }
                states = Some(seen);
            }
            "init" | "final" => {
                let [name] = args[..] else {
                    return Err(syntax("expected exactly one state name"));
                };
                let slot = if key.trim() == "init" { &mut init } else { &mut fin };
                if slot.is_some() {
                    return Err(syntax("declared twice"));
                }
                *slot = Some((line, name.to_string()));
            }
            "trans" => {
                let [from, op, to] = args[..] else {
                    return Err(syntax("expected `trans: <from> <op> <to>`"));
                };
                let op = Op::from_name(op).ok_or_else(|| MinskyError::UnknownOp { line, op: op.into() })?;
                transitions.push((line, Transition { from: from.into(), op, to: to.into() }));
            }
            other => return Err(syntax(&format!("unknown key `{other}`"))),
        }
    }

    let states = states.ok_or(MinskyError::Missing("states"))?;
    let (init_line, init) = init.ok_or(MinskyError::Missing("init"))?;
    let (fin_line, fin) = fin.ok_or(MinskyError::Missing("final"))?;
    let known = |s: &str| states.iter().any(|q| q == s);
    for (line, s) in [(init_line, &init), (fin_line, &fin)] {
        if !known(s) {
            return Err(MinskyError::UnknownState { line, state: s.clone() });
        }
    }
    for (line, t) in &transitions {
        for s in [&t.from, &t.to] {
            if !known(s) {
                return Err(MinskyError::UnknownState { line: *line, state: s.clone() });
            }
        }
    }
    MinskyMachine::new(states, &init, &fin, transitions.into_iter().map(|(_, t)| t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_parses() {
        let m = parse_machine(
            "# sample\nstates: q0 q1 q2 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 inc1 q2\ntrans: q2 zero2 qf # done\n",
        )
        .unwrap();
        assert_eq!(m.states().len(), 4);
        assert_eq!(m.transitions().len(), 3);
        assert_eq!(parse_machine(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn errors() {
        let e = parse_machine("states: a b\ninit: a\nfinal: b\ntrans: a inc1 c\n").unwrap_err();
        assert_eq!(e, MinskyError::UnknownState { line: 4, state: "c".into() });
        assert_eq!(parse_machine("states: a\nfinal: a\n").unwrap_err(), MinskyError::Missing("init"));
        assert_eq!(parse_machine("states: a\ninit: a\n").unwrap_err(), MinskyError::Missing("final"));
        assert_eq!(parse_machine("init: a\nfinal: a\n").unwrap_err(), MinskyError::Missing("states"));
        assert_eq!(parse_machine("states: a a\ninit: a\nfinal: a\n").unwrap_err(), MinskyError::DuplicateState("a".into()));
        assert!(matches!(
            parse_machine("states: a\ninit: a\nfinal: a\ntrans: a mul2 a\n").unwrap_err(),
            MinskyError::UnknownOp { line: 4, .. }
        ));
        assert!(matches!(parse_machine("states a\n").unwrap_err(), MinskyError::Syntax { line: 1, .. }));
        assert!(matches!(parse_machine("states: a\ninit: b\nfinal: a\n").unwrap_err(), MinskyError::UnknownState { line: 2, .. }));
    }

    #[test]
    fn no_transitions_is_valid() {
        let m = parse_machine("states: a b\ninit: a\nfinal: b\n").unwrap();
        assert!(m.transitions().is_empty());
    }
}
