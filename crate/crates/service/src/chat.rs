//! Line-oriented session for the terminal.

use std::io::{self, BufRead, Write};

use itinera_core::canonical;
use itinera_core::dialogue::{parse_command, render_user, DialogueSession, PriorityPolicy};
use itinera_core::kb::{KnowledgeBase, LinkId, PoiId};
use itinera_core::plan::{hhmm, CostLedger, Plan};
use itinera_core::planner::{PlanOutcome, SearchBudget};

const HELP: &str = "\
  set <slot> <value>     e.g. set from Wuhan, set to Hangzhou, Shanghai, set budget 5000
  require \"Name\"         also: exclude, accept, reject
  confirm
  revise dining 2        also: revise weather <day>, revise transport <day>, revise budget <amount>
  plan                   generate the itinerary
  show                   print the collected requirements
  quit";

fn activity_name(kb: &KnowledgeBase, id: &str) -> String {
    kb.poi(&PoiId::new(id))
        .map(|p| p.name.clone())
        .or_else(|| kb.link(&LinkId::new(id)).map(|l| format!("{} {} -> {}", l.number, l.from_station, l.to_station)))
        .unwrap_or_else(|| id.to_string())
}

pub fn render_plan(plan: &Plan, kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for (d, day) in plan.days.iter().enumerate() {
        out.push_str(&format!("Day {} {} {}\n", d + 1, day.date, day.city_id));
        for a in &day.activities {
            out.push_str(&format!(
                "  {}-{}  {:<10} {:<40} {:>10}\n",
                hhmm(a.start),
                hhmm(a.end),
                a.kind.as_str(),
                activity_name(kb, &a.poi_or_link),
                a.cost.to_string()
            ));
        }
    }
    out.push_str(&format!("Total {}\n", CostLedger::of(plan).total));
    out
}

fn report_outcome(outcome: &PlanOutcome, kb: &KnowledgeBase, out: &mut dyn Write) -> io::Result<()> {
    write!(out, "{}", render_plan(&outcome.plan, kb))?;
    let failed: Vec<&str> = outcome.report.results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    if failed.is_empty() {
        writeln!(out, "All constraints pass.")
    } else {
        writeln!(out, "Failing: {}", failed.join(", "))
    }
}

/// Read commands until `quit` or end of input.
pub fn chat(kb: &KnowledgeBase, id: &str, input: impl BufRead, out: &mut dyn Write) -> io::Result<DialogueSession> {
    let mut session = DialogueSession::new(id);
    writeln!(out, "Where would you like to go? Type `help` for commands.")?;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        match line {
            "" => continue,
            "quit" | "exit" => break,
            "help" => writeln!(out, "{HELP}")?,
            "show" => out.write_all(&canonical::to_pretty(&session.slots))?,
            "plan" => match session.generate(kb, SearchBudget::default()) {
                Ok(outcome) => report_outcome(&outcome, kb, out)?,
                Err(e) => writeln!(out, "Cannot plan yet: {e}")?,
            },
            _ => {
                let acts = match parse_command(line, kb, &session.slots) {
                    Ok(acts) => acts,
                    Err(e) => {
                        writeln!(out, "? {e}")?;
                        continue;
                    }
                };
                if let Err(e) = session.check_user_turn(&acts) {
                    writeln!(out, "? {e}")?;
                    continue;
                }
                let had_plan = session.plan.clone();
                session.submit_user(acts.clone(), render_user(&acts)).expect("checked above");
                let turn = session.assistant_turn(kb, &PriorityPolicy).expect("user turn was just submitted");
                writeln!(out, "{}", turn.text)?;
                if let Some(plan) = session.plan.as_ref().filter(|p| had_plan.as_ref() != Some(*p)) {
                    write!(out, "{}", render_plan(plan, kb))?;
                }
            }
        }
    }
    Ok(session)
}
