fn main() {
    println!("descent");
}
