//! Parse a judge-model response: structural validation, score extraction,
//! and diagnostic-field parsing from templated reasons.

use vectra::parser::{parse_response, render_assessment, validate_structure};
use vectra::{Assessment, DimensionId, ScoreLevel};

fn main() {
    // A well-formed response, rendered from an assessment the same way a
    // trained judge would emit it.
    let mut gold = Assessment::uniform(ScoreLevel::Excellent);
    gold = Assessment::from_entries(gold.iter().cloned().map(|mut e| {
        if e.dimension == DimensionId::TextColor {
            e.score = ScoreLevel::Fair;
            e.reason = "Banner text of translated image is washed out in top region \
                        compared to source, impacting 20% of the area (DAR approx 20%)."
                .to_string();
        }
        e
    }))
    .unwrap();

    let text = render_assessment(&gold);
    println!("--- canonical response ({} bytes) ---", text.len());
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    println!("...\n");

    let report = validate_structure(&text);
    let valid = report
        .per_dimension
        .values()
        .filter(|d| d.ordered_pair_valid)
        .count();
    println!("dimensions with valid tag pairs: {valid}/14");

    let parsed = parse_response(&text);
    let entry = &parsed.assessment[&DimensionId::TextColor];
    println!("t_color score: {}", entry.score);
    if let Some(fields) = &entry.reason_fields {
        println!("  content:  {}", fields.content);
        println!("  issue:    {}", fields.issue);
        println!("  position: {}", fields.position);
        println!("  dar:      {:?}", fields.effect_dar.map(|d| d.value()));
    }

    // Now damage the response: drop one closing tag, corrupt one label.
    let broken = text
        .replace("</t_size_reason>", "")
        .replace("<t_pos_score>3-Excellent", "<t_pos_score>superb");
    let parsed = parse_response(&broken);
    println!("\n--- after damaging the response ---");
    let t_size = parsed.report.per_dimension[&DimensionId::TextSize];
    println!(
        "t_size: tags_present={} ordered={}",
        t_size.tags_present, t_size.ordered_pair_valid
    );
    println!("extracted dimensions: {}/14", parsed.assessment.len());
    for note in &parsed.report.parse_notes {
        println!("note: {note}");
    }
}
