package org.apache.camel.component.file;

import java.io.File;

/**
 * For consuming files.
 */
public class FileConsumer {
    private final File directory;
    private String moveNamePrefix;
    private boolean recursive = true;

    public FileConsumer(File directory) {
        this.directory = directory;
    }

    /**
     * Polls the directory and processes every file not yet moved away.
     */
    protected int pollDirectory(File fileOrDirectory) {
        int count = 0;
        File[] files = fileOrDirectory.listFiles();
        if (files == null) {
            return 0;
        }
        for (File file : files) {
            if (file.isDirectory() && recursive) {
                count += pollDirectory(file);
            } else if (isValidFile(file)) {
                count++;
            }
        }
        return count;
    }

    protected boolean isValidFile(File file) {
        return moveNamePrefix == null || !file.getName().startsWith(moveNamePrefix);
    }

    public void setMoveNamePrefix(String moveNamePrefix) {
        this.moveNamePrefix = moveNamePrefix;
    }
}
