class Config {
    private String name;
    private static final int LIMIT = 10;
}
