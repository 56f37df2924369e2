//! Lists the built-in models with their defaults and dimensions.

use folilab::models::list_models;
use folilab::{make_model, ModelSpec};

fn main() -> folilab::Result<()> {
    for (name, description, defaults) in list_models() {
        let fm = make_model(&ModelSpec::new(name))?;
        println!("{name}: dim {}, leaves of dim {}", fm.dimension(), fm.leaf_dim);
        println!("  {description}");
        for (k, v) in defaults {
            println!("  {k} = {v}");
        }
    }
    Ok(())
}
