class Config {
    private String name;

    String name() {
        return name;
    }
}
