package fixtures;

import java.util.HashMap;

public class ParseHeader15 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    static int resolveAlias(int code) {
        switch (code) {
            case 1:
                return 10;
            case 2:
                return 20;
            default:
                return -1;
        }
    }

    /** Counts non-empty entries. */
    public long readRows(java.util.Map<String, String> m) {
        return m.values().stream().filter(s -> !s.isEmpty()).count();
    }
}
