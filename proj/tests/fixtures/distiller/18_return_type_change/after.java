class Repo {
    long count() {
        return items.size();
    }
}
