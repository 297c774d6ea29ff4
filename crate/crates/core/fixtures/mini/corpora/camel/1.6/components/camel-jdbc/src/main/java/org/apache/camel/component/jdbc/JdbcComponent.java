package org.apache.camel.component.jdbc;

import java.util.Map;

import javax.sql.DataSource;

/**
 * Component for executing SQL statements over a data source.
 */
public class JdbcComponent {
    private DataSource ds;

    public JdbcComponent() {
    }

    protected JdbcEndpoint createEndpoint(String uri, String remaining, Map<String, Object> parameters) throws Exception {
        return new JdbcEndpoint(uri, this, ds);
    }

    public void setDataSource(DataSource dataSource) {
        this.ds = dataSource;
    }
}
