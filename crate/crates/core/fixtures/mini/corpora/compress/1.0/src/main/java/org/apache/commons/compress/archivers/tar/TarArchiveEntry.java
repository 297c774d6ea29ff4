package org.apache.commons.compress.archivers.tar;

/**
 * This class represents an entry in a Tar archive. It consists of the entry's
 * header, as well as the entry's File.
 */
public class TarArchiveEntry {

    private String name = "";
    private long size = 0;
    private long modTime;

    public TarArchiveEntry(final String name) {
        this.name = name;
    }

    public String getName() {
        return name;
    }

    /**
     * Get this entry's file size. Sizes above the octal field limit are
     * stored in the star/GNU binary format.
     */
    public long getSize() {
        return size;
    }

    public void setSize(final long size) {
        if (size < 0) {
            throw new IllegalArgumentException("Size is out of range: " + size);
        }
        this.size = size;
    }

    public long getModTime() {
        return modTime;
    }
}
