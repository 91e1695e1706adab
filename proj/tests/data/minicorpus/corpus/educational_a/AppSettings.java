public final class AppSettings {
    private static AppSettings instance;

    private String environment;

    private AppSettings() {
        this.environment = "production";
    }

    public static AppSettings getInstance() {
        if (instance == null) {
            instance = new AppSettings();
        }
        return instance;
    }

    public String getEnvironment() {
        return environment;
    }

    public void setEnvironment(String environment) {
        this.environment = environment;
    }
}
