package org.apache.camel.component.jdbc;

import javax.sql.DataSource;

/**
 * The jdbc endpoint, bound to one data source.
 */
public class JdbcEndpoint {
    private int readSize;
    private DataSource dataSource;

    public JdbcEndpoint(String endpointUri, JdbcComponent component, DataSource dataSource) {
        this.dataSource = dataSource;
    }

    public JdbcProducer createProducer() throws Exception {
        return new JdbcProducer(this, readSize);
    }

    public DataSource getDataSource() {
        return dataSource;
    }

    public void setReadSize(int readSize) {
        this.readSize = readSize;
    }
}
