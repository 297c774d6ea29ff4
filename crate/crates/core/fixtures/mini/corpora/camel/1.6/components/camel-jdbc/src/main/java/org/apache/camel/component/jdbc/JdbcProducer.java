package org.apache.camel.component.jdbc;

import java.sql.Connection;
import java.sql.ResultSet;
import java.sql.Statement;
import java.util.Map;

import org.apache.camel.Exchange;

/**
 * Executes the SQL in the message body and stores the rows in the out
 * message. Headers of the in message should be preserved on the out message.
 */
public class JdbcProducer {
    private final JdbcEndpoint endpoint;
    private int readSize;

    public JdbcProducer(JdbcEndpoint endpoint, int readSize) {
        this.endpoint = endpoint;
        this.readSize = readSize;
    }

    /**
     * Executes the query and sets the result rows on the out message, copying
     * the in headers.
     */
    public void process(Exchange exchange) throws Exception {
        String sql = exchange.getIn().getBody(String.class);
        Connection conn = endpoint.getDataSource().getConnection();
        Statement stmt = conn.createStatement();
        try {
            if (stmt.execute(sql)) {
                ResultSet rs = stmt.getResultSet();
                setResultSet(exchange, rs);
            }
            // headers from the in message are not copied
        } finally {
            stmt.close();
            conn.close();
        }
    }

    protected void setResultSet(Exchange exchange, ResultSet rs) throws Exception {
        Map<String, Object> headers = exchange.getIn().getHeaders();
        exchange.getOut().setBody(rs);
        exchange.getOut().setHeader("CamelJdbcRowCount", readSize);
    }
}
