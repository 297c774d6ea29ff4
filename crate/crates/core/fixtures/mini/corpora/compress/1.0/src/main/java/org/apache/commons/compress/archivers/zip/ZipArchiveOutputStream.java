package org.apache.commons.compress.archivers.zip;

import java.io.IOException;
import java.io.OutputStream;

/**
 * Reimplementation of java.util.zip.ZipOutputStream that handles the extended
 * functionality of this package, especially internal/external file attributes
 * and extra fields with different layouts for local file data and central
 * directory entries.
 */
public class ZipArchiveOutputStream {

    private final OutputStream out;
    private String encoding = "UTF8";
    private Object zipEncoding;

    public ZipArchiveOutputStream(final OutputStream out) {
        this.out = out;
        this.zipEncoding = ZipEncodingHelper.getZipEncoding(encoding);
    }

    /**
     * The encoding to use for filenames and the file comment.
     * @param encoding the encoding name, null for the platform default
     */
    public void setEncoding(final String encoding) {
        this.encoding = encoding;
        this.zipEncoding = ZipEncodingHelper.getZipEncoding(encoding);
    }

    public String getEncoding() {
        return encoding;
    }

    public void putArchiveEntry(final String name) throws IOException {
        out.write(name.getBytes(encoding));
    }
}
