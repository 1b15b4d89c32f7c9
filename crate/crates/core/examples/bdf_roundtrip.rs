//! Write the reference mesh as a small-field bulk data deck, read it back
//! and print the deck.

use panelize::bdf::{parse_bdf, write_bdf, BulkDeck};
use panelize::fixtures::reference_mesh;

fn main() {
    let deck = BulkDeck::from_mesh(reference_mesh());
    let text = write_bdf(&deck, None).expect("non-empty mesh");
    let back = parse_bdf(&text).expect("writer output parses");
    assert_eq!(back.mesh, deck.mesh);
    print!("{text}");

    // free-field cards and comments read the same
    let free = "$ one triangle\nGRID,1,,0.,0.,0.\nGRID,2,,1.,0.,0.\nGRID,3,,0.,1.,0.\nCTRIA3,7,,1,2,3 $ blank PID\nENDDATA\n";
    let small = parse_bdf(free).expect("valid free-field deck");
    println!(
        "$ free-field: element 7 has PID {}",
        small.property_id(7.into())
    );
}
